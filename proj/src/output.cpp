#include <fstream>
#include <sstream>

#include "se23lqr/error.hpp"
#include "se23lqr/harness.hpp"

#include <json.hpp>

namespace se23lqr {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::kIo, path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, path.string() + ": cannot open for writing");
  os.precision(17);
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw Error(ErrorCode::kIo, path.string() + ": write failed");
}

}  // namespace

void write_tick_csv(const std::filesystem::path& path, const TrialResult& result) {
  auto os = open_out(path);
  os << "t";
  for (const char* block : {"xi_phi", "xi_v", "xi_r", "xi_i"})
    for (const char* axis : {"x", "y", "z"}) os << ',' << block << '_' << axis;
  os << ",thrust,omega_cmd_x,omega_cmd_y,omega_cmd_z,moment_x,moment_y,moment_z\n";
  for (const auto& rec : result.series) {
    os << rec.t;
    for (int i = 0; i < kStateDim; ++i) os << ',' << rec.xi[i];
    os << ',' << rec.thrust;
    for (int i = 0; i < 3; ++i) os << ',' << rec.omega_cmd[i];
    for (int i = 0; i < 3; ++i) os << ',' << rec.moment[i];
    os << '\n';
  }
  finish(os, path);
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<TrialResult>& results) {
  auto os = open_out(path);
  os << "label,variant,heading_rad,seed,rmse_phi,rmse_v,rmse_r,transient_rmse_r,final_position_error,"
        "kappa_1,kappa_2,kappa_3,kappa_4\n";
  for (const auto& r : results) {
    os << r.label << ',' << r.variant << ',' << r.heading << ',' << r.seed << ',' << r.rmse_phi << ','
       << r.rmse_v << ',' << r.rmse_r << ',' << r.transient_rmse_r << ',' << r.final_position_error;
    for (double k : r.kappa) os << ',' << k;
    os << '\n';
  }
  finish(os, path);
}

void write_aggregate_csv(const std::filesystem::path& path, const std::vector<ControllerAggregate>& agg) {
  auto os = open_out(path);
  os << "variant,component,mean,lower,upper,within_band\n";
  for (const auto& a : agg) {
    const std::pair<const char*, const ComponentStats*> parts[] = {{"phi", &a.phi}, {"v", &a.v}, {"r", &a.r}};
    for (const auto& [name, s] : parts) {
      os << a.variant << ',' << name << ',' << s->mean << ',' << s->lower << ',' << s->upper << ','
         << s->within_band << '\n';
    }
  }
  finish(os, path);
}

void write_manifest(const std::filesystem::path& path, const std::string& experiment,
                    const std::string& config_json, std::uint64_t seed) {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["version"] = kVersion;
  try {
    j["config"] = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("write_manifest: config echo is not JSON: ") + e.what());
  }
  auto os = open_out(path);
  os << j.dump(2) << '\n';
  finish(os, path);
}

}  // namespace se23lqr
