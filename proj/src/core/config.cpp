#include "core/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace lskum {

namespace {

double to_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::config, "bad numeric value for " + key + ": '" + value + "'");
  }
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::config, "bad integer value for " + key + ": '" + value + "'");
  }
  return v;
}

// "NXxNY" → (nx, ny); shared by the rectangle and annulus generator specs.
std::pair<int, int> parse_dims(const std::string& key, const std::string& text) {
  const auto sep = text.find('x');
  if (sep == std::string::npos) {
    throw Error(ErrorCode::config, "bad " + key + " spec '" + text + "' (expected NXxNY)");
  }
  const int a = static_cast<int>(to_int(key, text.substr(0, sep)));
  const int b = static_cast<int>(to_int(key, text.substr(sep + 1)));
  return {a, b};
}

}  // namespace

void SolverConfig::validate() const {
  if (!(mach >= 0.0)) throw Error(ErrorCode::config, "mach must be >= 0");
  if (!(gamma > 1.0)) throw Error(ErrorCode::config, "gamma must be > 1");
  if (iters < 0) throw Error(ErrorCode::config, "iters must be >= 0");
  if (n_inner < 1) throw Error(ErrorCode::config, "inner must be >= 1");
  if (!(cfl > 0.0)) throw Error(ErrorCode::config, "cfl must be > 0");
  if (order != 1 && order != 2) throw Error(ErrorCode::config, "order must be 1 or 2");
  if (n_parts < 1) throw Error(ErrorCode::config, "parts must be >= 1");
  if (n_workers < 1) throw Error(ErrorCode::config, "workers must be >= 1");
}

PointCloud acquire_cloud(const GridSpec& spec) {
  const bool have_file = !spec.grid_path.empty();
  const bool have_gen = !spec.generate.empty();
  if (have_file == have_gen) {
    throw Error(ErrorCode::config, "exactly one of grid path or generator spec required");
  }
  if (have_file) {
    return read_point_cloud_file(spec.grid_path);
  }
  const std::string kAnnulus = "annulus:";
  if (spec.generate.rfind(kAnnulus, 0) == 0) {
    const auto [nt, nr] = parse_dims("generate", spec.generate.substr(kAnnulus.size()));
    return generate_annulus_cloud(nt, nr, spec.outer_radius, spec.jitter, spec.seed,
                                  spec.knn);
  }
  const auto [nx, ny] = parse_dims("generate", spec.generate);
  return generate_rect_cloud(nx, ny, spec.bounds, spec.jitter, spec.seed, spec.knn);
}

Layout parse_layout(const std::string& name) {
  if (name == "aos") return Layout::aos;
  if (name == "soa") return Layout::soa;
  throw Error(ErrorCode::config, "unknown layout '" + name + "' (expected aos or soa)");
}

ResidualMode parse_residual_mode(const std::string& name) {
  if (name == "fused") return ResidualMode::fused;
  if (name == "split4") return ResidualMode::split4;
  throw Error(ErrorCode::config,
              "unknown residual mode '" + name + "' (expected fused or split4)");
}

const char* layout_name(Layout layout) {
  return layout == Layout::aos ? "aos" : "soa";
}

const char* residual_mode_name(ResidualMode mode) {
  return mode == ResidualMode::fused ? "fused" : "split4";
}

void apply_config_entry(SolverConfig& cfg, GridSpec& grid, const std::string& key,
                        const std::string& value) {
  if (key == "mach") cfg.mach = to_real(key, value);
  else if (key == "aoa") cfg.aoa_deg = to_real(key, value);
  else if (key == "gamma") cfg.gamma = to_real(key, value);
  else if (key == "iters") cfg.iters = static_cast<int>(to_int(key, value));
  else if (key == "inner") cfg.n_inner = static_cast<int>(to_int(key, value));
  else if (key == "cfl") cfg.cfl = to_real(key, value);
  else if (key == "order") cfg.order = static_cast<int>(to_int(key, value));
  else if (key == "layout") cfg.layout = parse_layout(value);
  else if (key == "residual_mode") cfg.residual_mode = parse_residual_mode(value);
  else if (key == "parts") cfg.n_parts = static_cast<int>(to_int(key, value));
  else if (key == "workers") cfg.n_workers = static_cast<int>(to_int(key, value));
  else if (key == "out_prefix") cfg.out_prefix = value;
  else if (key == "grid") grid.grid_path = value;
  else if (key == "generate") grid.generate = value;
  else if (key == "jitter") grid.jitter = to_real(key, value);
  else if (key == "seed") grid.seed = static_cast<std::uint64_t>(to_int(key, value));
  else if (key == "knn") grid.knn = static_cast<int>(to_int(key, value));
  else if (key == "outer_radius") grid.outer_radius = to_real(key, value);
  else if (key == "bounds") {
    std::istringstream iss(value);
    char c1 = 0, c2 = 0, c3 = 0;
    RectBounds b;
    if (!(iss >> b.xmin >> c1 >> b.xmax >> c2 >> b.ymin >> c3 >> b.ymax) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw Error(ErrorCode::config,
                  "bad bounds '" + value + "' (expected xmin,xmax,ymin,ymax)");
    }
    grid.bounds = b;
  } else {
    throw Error(ErrorCode::config, "unknown config key '" + key + "'");
  }
}

void load_config_file(SolverConfig& cfg, GridSpec& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open config file: " + path);
  }
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string trimmed = line.substr(first, last - first + 1);
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::config, path + ":" + std::to_string(line_no) +
                                         ": expected key=value, got '" + trimmed + "'");
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    apply_config_entry(cfg, grid, strip(trimmed.substr(0, eq)),
                       strip(trimmed.substr(eq + 1)));
  }
}

}  // namespace lskum
