#include "hpe/trajectory_io.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "hpe/format.hpp"
#include "hpe/snapshot.hpp"

namespace hpe {

std::string sim_config_json(const SimConfig& cfg) {
  nlohmann::ordered_json j;
  j["theta"] = cfg.theta;
  j["m"] = cfg.m;
  j["T"] = cfg.T;
  j["dt"] = cfg.dt;
  j["seed"] = cfg.master_seed;
  j["ensemble"] = cfg.ensemble;
  j["scheme"] = std::string(to_string(cfg.scheme));
  j["record_stride"] = cfg.record_stride;
  j["fast"] = cfg.fast_nonlinearity;
  return j.dump();
}

void write_observables_csv(std::ostream& os, const std::vector<Trajectory>& trajectories,
                           const std::vector<ModeIndex>& modes) {
  os << "t,replica,mode_k1,mode_k2,omega,G,G_mild,M\n";
  for (std::size_t r = 0; r < trajectories.size(); ++r) {
    const auto& tr = trajectories[r];
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      for (const auto& k : modes) {
        os << format_double(tr.times[i]) << ',' << r << ',' << k.k1() << ',' << k.k2() << ','
           << format_double(tr.states[i][k]) << ',' << format_double(tr.G[i][k]) << ','
           << format_double(tr.G_mild[i][k]) << ',' << format_double(tr.M[i][k]) << '\n';
      }
    }
  }
}

std::vector<std::filesystem::path> write_run_outputs(const std::filesystem::path& dir,
                                                     const std::vector<Trajectory>& trajectories,
                                                     const std::vector<ModeIndex>& modes) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "states");
  std::vector<fs::path> written;
  {
    std::ofstream os(dir / "observables.csv");
    if (!os) throw std::runtime_error("cannot write " + (dir / "observables.csv").string());
    write_observables_csv(os, trajectories, modes);
    written.emplace_back("observables.csv");
  }
  for (std::size_t r = 0; r < trajectories.size(); ++r) {
    for (std::size_t i = 0; i < trajectories[r].states.size(); ++i) {
      const fs::path rel =
          fs::path("states") / ("r" + std::to_string(r) + "_i" + std::to_string(i) + ".txt");
      save_snapshot(dir / rel, trajectories[r].states[i]);
      written.push_back(rel);
    }
  }
  return written;
}

}  // namespace hpe
