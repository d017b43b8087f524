#include "cvqd/io.hpp"

#include <climits>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cvqd/fock.hpp"

namespace cvqd::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Err::IoError, "cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), std::streamsize(contents.size()));
    out.flush();
    if (!out) throw Error(Err::IoError, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Err::IoError, "cannot rename into '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Err::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Err::IoError, "read failure on '" + path + "'");
  return ss.str();
}

void save_state(const std::string& path, const DensityMatrix& rho) {
  const int d = rho.dim();
  if (rho.data.rows() != d || rho.data.cols() != d)
    throw Error(Err::InvalidState, "state matrix does not match its declared shape");
  std::string s;
  s.reserve(size_t(d) * size_t(d) * 48 + 128);
  s += "{\n  \"version\": 1,\n  \"modes\": ";
  s += std::to_string(rho.modes);
  s += ",\n  \"cutoff\": ";
  s += std::to_string(rho.cutoff);
  s += ",\n  \"data\": [\n";
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      s += "    [";
      s += format_g17(rho.data(i, j).real());
      s += ", ";
      s += format_g17(rho.data(i, j).imag());
      s += (i == d - 1 && j == d - 1) ? "]\n" : "],\n";
    }
  }
  s += "  ]\n}\n";
  atomic_write_file(path, s);
}

namespace {

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(Err::IoError, "malformed JSON in " + what);
  return j;
}

}  // namespace

DensityMatrix load_state(const std::string& path) {
  json j = parse_json(read_file(path), "state file '" + path + "'");
  if (!j.is_object() || !j.contains("version") || !j.contains("modes") ||
      !j.contains("cutoff") || !j.contains("data"))
    throw Error(Err::IoError, "state file '" + path + "' is missing required fields");
  if (!j["version"].is_number_integer() || j["version"].get<int>() != 1)
    throw Error(Err::IoError, "unsupported state file version");
  DensityMatrix rho;
  if (!j["modes"].is_number_integer() || !j["cutoff"].is_number_integer())
    throw Error(Err::IoError, "state file shape fields must be integers");
  rho.modes = j["modes"].get<int>();
  rho.cutoff = j["cutoff"].get<int>();
  if (rho.modes != 1 && rho.modes != 2)
    throw Error(Err::IoError, "state file modes must be 1 or 2");
  if (rho.cutoff < 1) throw Error(Err::IoError, "state file cutoff must be positive");
  const int d = rho.dim();
  const json& data = j["data"];
  if (!data.is_array() || data.size() != size_t(d) * size_t(d))
    throw Error(Err::IoError, "state file data length does not match shape");
  rho.data = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      const json& cell = data[size_t(i) * d + k];
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
          !cell[1].is_number())
        throw Error(Err::IoError, "state file entries must be [re, im] pairs");
      rho.data(i, k) = cxd(cell[0].get<double>(), cell[1].get<double>());
    }
  return rho;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
  try {
    return from_text(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == Err::ConfigError)
      throw Error(Err::ConfigError, std::string(e.what()) + " in '" + path + "'");
    throw;
  }
}

ConfigMap ConfigMap::from_text(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // strip comments, respecting quoted values
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[')
      throw Error(Err::ConfigError,
                  "sections are not supported (line " + std::to_string(lineno) + ")");
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Err::ConfigError,
                  "expected key = value (line " + std::to_string(lineno) + ")");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() ||
        key.find_first_not_of(
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") !=
            std::string::npos)
      throw Error(Err::ConfigError, "bad key '" + key + "' (line " +
                                        std::to_string(lineno) + ")");
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') {
      val = val.substr(1, val.size() - 2);
      if (val.find('"') != std::string::npos)
        throw Error(Err::ConfigError, "bad quoting (line " + std::to_string(lineno) + ")");
    } else if (val.empty() || val.find('"') != std::string::npos) {
      throw Error(Err::ConfigError,
                  "bad value for '" + key + "' (line " + std::to_string(lineno) + ")");
    }
    if (!cfg.kv_.emplace(key, val).second)
      throw Error(Err::ConfigError, "duplicate key '" + key + "' (line " +
                                        std::to_string(lineno) + ")");
  }
  return cfg;
}

bool ConfigMap::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string ConfigMap::get_string(const std::string& key, const std::string& def) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? def : it->second;
}

std::string ConfigMap::require_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end())
    throw Error(Err::ConfigError, "missing required config key '" + key + "'");
  return it->second;
}

double ConfigMap::get_double(const std::string& key, double def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw Error(Err::ConfigError, "key '" + key + "' is not a number: '" + it->second + "'");
  }
}

int ConfigMap::get_int(const std::string& key, int def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  try {
    size_t pos = 0;
    long v = std::stol(it->second, &pos, 10);
    if (pos != it->second.size() || v < INT_MIN || v > INT_MAX)
      throw std::invalid_argument("");
    return int(v);
  } catch (const std::exception&) {
    throw Error(Err::ConfigError,
                "key '" + key + "' is not an integer: '" + it->second + "'");
  }
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(it->second, &pos, 10);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw Error(Err::ConfigError,
                "key '" + key + "' is not an unsigned integer: '" + it->second + "'");
  }
}

trainer::TrainConfig desk_gen_profile() { return trainer::TrainConfig{}; }

trainer::TrainConfig paper_gen_profile() {
  trainer::TrainConfig cfg;
  cfg.cutoff = 15;
  cfg.layers = 30;
  cfg.timesteps = 112;
  cfg.nbar = 0.0;
  cfg.eta0 = 0.99974;
  cfg.etaT = 0.99331;
  cfg.batch_size = 24;
  cfg.max_iters = 99;
  cfg.lr0 = 0.00778;
  cfg.decay_steps = 8;
  cfg.decay_rate = 0.9427;
  cfg.lambda = 8.55e-5;
  cfg.gamma = 100.0;
  return cfg;
}

trainer::TrainConfig desk_restore_profile() {
  trainer::TrainConfig cfg;
  cfg.timesteps = 40;
  cfg.nbar = 0.5;
  // cumulative transmissivity ~0.5 at t=40, the middle of the corruption range
  cfg.eta0 = 0.9999;
  cfg.etaT = 0.9655;
  cfg.batch_size = 16;
  cfg.max_iters = 4000;
  cfg.lr0 = 0.01;
  cfg.decay_steps = 400;
  cfg.decay_rate = 0.74;
  cfg.s_max = 0.7;
  // finite differences over 128 parameters would make this profile intractable
  cfg.grad_mode = trainer::GradMode::Analytic;
  return cfg;
}

trainer::TrainConfig paper_restore_profile() {
  trainer::TrainConfig cfg;
  cfg.cutoff = 15;
  cfg.layers = 30;
  cfg.timesteps = 150;
  cfg.nbar = 0.5;
  auto [e0, eT] = diffusion::beta_to_eta(1e-4, 0.05);
  cfg.eta0 = e0;
  cfg.etaT = eT;
  cfg.batch_size = 48;
  cfg.max_iters = 112;
  cfg.lr0 = 0.00045;
  cfg.decay_steps = 24;
  cfg.decay_rate = 0.906;
  cfg.lambda = 0.16;
  cfg.gamma = 100.0;
  return cfg;
}

trainer::TrainConfig apply_config(const ConfigMap& cfg, trainer::TrainConfig base) {
  static const char* known[] = {
      "cutoff",     "layers",     "total_timesteps", "nbar",        "eta_0",
      "eta_T",      "beta_start", "beta_end",        "batch_size",  "max_iters",
      "learning_rate", "decay_steps", "decay_rate",  "lambda",      "gamma",
      "grad_mode",  "fd_step",    "seed",            "alpha_embed", "s_max",
      "init_scale", "spsa_avg",   "target",          "alpha_re",    "alpha_im",
      "fock_n",     "parity",     "squeeze_r"};
  for (const auto& [key, val] : cfg.entries()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw Error(Err::ConfigError, "unknown config key '" + key + "'");
  }
  base.cutoff = cfg.get_int("cutoff", base.cutoff);
  base.layers = cfg.get_int("layers", base.layers);
  base.timesteps = cfg.get_int("total_timesteps", base.timesteps);
  base.nbar = cfg.get_double("nbar", base.nbar);
  if (cfg.has("eta_0") || cfg.has("eta_T")) {
    base.eta0 = cfg.get_double("eta_0", base.eta0);
    base.etaT = cfg.get_double("eta_T", base.etaT);
  } else if (cfg.has("beta_start") || cfg.has("beta_end")) {
    if (!cfg.has("beta_start") || !cfg.has("beta_end"))
      throw Error(Err::ConfigError, "beta_start and beta_end must be given together");
    auto [e0, eT] = diffusion::beta_to_eta(cfg.get_double("beta_start", 0),
                                           cfg.get_double("beta_end", 0));
    base.eta0 = e0;
    base.etaT = eT;
  }
  base.batch_size = cfg.get_int("batch_size", base.batch_size);
  base.max_iters = cfg.get_int("max_iters", base.max_iters);
  base.lr0 = cfg.get_double("learning_rate", base.lr0);
  base.decay_steps = cfg.get_int("decay_steps", base.decay_steps);
  base.decay_rate = cfg.get_double("decay_rate", base.decay_rate);
  base.lambda = cfg.get_double("lambda", base.lambda);
  base.gamma = cfg.get_double("gamma", base.gamma);
  if (cfg.has("grad_mode"))
    base.grad_mode = trainer::grad_mode_from_string(cfg.require_string("grad_mode"));
  base.fd_step = cfg.get_double("fd_step", base.fd_step);
  base.seed = cfg.get_u64("seed", base.seed);
  base.alpha_embed = cfg.get_double("alpha_embed", base.alpha_embed);
  base.s_max = cfg.get_double("s_max", base.s_max);
  base.init_scale = cfg.get_double("init_scale", base.init_scale);
  base.spsa_avg = cfg.get_int("spsa_avg", base.spsa_avg);
  return base;
}

TargetDescriptor target_from_config(const ConfigMap& cfg) {
  TargetDescriptor td;
  td.kind = cfg.require_string("target");
  if (td.kind != "coherent" && td.kind != "fock" && td.kind != "cat" &&
      td.kind != "squeezed")
    throw Error(Err::ConfigError, "unknown target kind '" + td.kind + "'");
  td.alpha_re = cfg.get_double("alpha_re", 0.0);
  td.alpha_im = cfg.get_double("alpha_im", 0.0);
  td.fock_n = cfg.get_int("fock_n", 0);
  td.parity = cfg.get_string("parity", "even");
  if (td.parity != "even" && td.parity != "odd")
    throw Error(Err::ConfigError, "parity must be even or odd");
  td.squeeze_r = cfg.get_double("squeeze_r", 0.0);
  return td;
}

DensityMatrix build_target(const TargetDescriptor& td, int cutoff) {
  if (td.kind == "coherent")
    return fock::make_coherent(cxd(td.alpha_re, td.alpha_im), cutoff);
  if (td.kind == "fock") return fock::make_fock(td.fock_n, cutoff);
  if (td.kind == "cat")
    return fock::make_cat(cxd(td.alpha_re, td.alpha_im), td.parity == "even", cutoff);
  if (td.kind == "squeezed") return fock::make_squeezed_vacuum(td.squeeze_r, cutoff);
  throw Error(Err::ConfigError, "unknown target kind '" + td.kind + "'");
}

namespace {

void append_cfg_json(std::string& s, const trainer::TrainConfig& cfg) {
  s += "    \"cutoff\": " + std::to_string(cfg.cutoff);
  s += ",\n    \"layers\": " + std::to_string(cfg.layers);
  s += ",\n    \"total_timesteps\": " + std::to_string(cfg.timesteps);
  s += ",\n    \"nbar\": " + format_g17(cfg.nbar);
  s += ",\n    \"eta_0\": " + format_g17(cfg.eta0);
  s += ",\n    \"eta_T\": " + format_g17(cfg.etaT);
  s += ",\n    \"batch_size\": " + std::to_string(cfg.batch_size);
  s += ",\n    \"max_iters\": " + std::to_string(cfg.max_iters);
  s += ",\n    \"learning_rate\": " + format_g17(cfg.lr0);
  s += ",\n    \"decay_steps\": " + std::to_string(cfg.decay_steps);
  s += ",\n    \"decay_rate\": " + format_g17(cfg.decay_rate);
  s += ",\n    \"lambda\": " + format_g17(cfg.lambda);
  s += ",\n    \"gamma\": " + format_g17(cfg.gamma);
  s += ",\n    \"grad_mode\": \"" + trainer::grad_mode_to_string(cfg.grad_mode) + "\"";
  s += ",\n    \"fd_step\": " + format_g17(cfg.fd_step);
  s += ",\n    \"seed\": " + std::to_string(cfg.seed);
  s += ",\n    \"alpha_embed\": " + format_g17(cfg.alpha_embed);
  s += ",\n    \"s_max\": " + format_g17(cfg.s_max);
  s += ",\n    \"init_scale\": " + format_g17(cfg.init_scale);
  s += ",\n    \"spsa_avg\": " + std::to_string(cfg.spsa_avg);
}

trainer::TrainConfig cfg_from_json(const json& j) {
  trainer::TrainConfig cfg;
  if (!j.is_object()) throw Error(Err::IoError, "checkpoint cfg must be an object");
  auto need = [&](const char* k) -> const json& {
    if (!j.contains(k))
      throw Error(Err::IoError, std::string("checkpoint cfg missing '") + k + "'");
    return j[k];
  };
  cfg.cutoff = need("cutoff").get<int>();
  cfg.layers = need("layers").get<int>();
  cfg.timesteps = need("total_timesteps").get<int>();
  cfg.nbar = need("nbar").get<double>();
  cfg.eta0 = need("eta_0").get<double>();
  cfg.etaT = need("eta_T").get<double>();
  cfg.batch_size = need("batch_size").get<int>();
  cfg.max_iters = need("max_iters").get<int>();
  cfg.lr0 = need("learning_rate").get<double>();
  cfg.decay_steps = need("decay_steps").get<int>();
  cfg.decay_rate = need("decay_rate").get<double>();
  cfg.lambda = need("lambda").get<double>();
  cfg.gamma = need("gamma").get<double>();
  cfg.grad_mode = trainer::grad_mode_from_string(need("grad_mode").get<std::string>());
  cfg.fd_step = need("fd_step").get<double>();
  cfg.seed = need("seed").get<std::uint64_t>();
  cfg.alpha_embed = need("alpha_embed").get<double>();
  cfg.s_max = need("s_max").get<double>();
  cfg.init_scale = need("init_scale").get<double>();
  cfg.spsa_avg = need("spsa_avg").get<int>();
  return cfg;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  if (ck.role != "generative" && ck.role != "restoration")
    throw Error(Err::ConfigError, "checkpoint role must be generative or restoration");
  if (ck.theta.size() != long(denoiser::kParamsPerLayer) * ck.cfg.layers)
    throw Error(Err::ConfigError, "checkpoint theta length does not match layers");
  std::string s;
  s.reserve(size_t(ck.theta.size()) * 28 + 2048);
  s += "{\n  \"format_version\": \"" + ck.format_version + "\",\n";
  s += "  \"layout\": \"" + ck.layout + "\",\n";
  s += "  \"role\": \"" + ck.role + "\",\n";
  s += "  \"cfg\": {\n";
  append_cfg_json(s, ck.cfg);
  s += "\n  },\n  \"theta\": [";
  for (long i = 0; i < ck.theta.size(); ++i) {
    s += i ? ", " : "";
    s += format_g17(ck.theta[i]);
  }
  s += "],\n  \"target\": ";
  if (ck.target.kind.empty()) {
    s += "null";
  } else {
    s += "{\"kind\": \"" + ck.target.kind + "\"";
    s += ", \"alpha_re\": " + format_g17(ck.target.alpha_re);
    s += ", \"alpha_im\": " + format_g17(ck.target.alpha_im);
    s += ", \"fock_n\": " + std::to_string(ck.target.fock_n);
    s += ", \"parity\": \"" + ck.target.parity + "\"";
    s += ", \"squeeze_r\": " + format_g17(ck.target.squeeze_r) + "}";
  }
  s += ",\n  \"summary\": {\"final_loss\": " + format_g17(ck.summary.final_loss);
  s += ", \"best_loss\": " + format_g17(ck.summary.best_loss);
  s += ", \"iterations\": " + std::to_string(ck.summary.iterations);
  s += ", \"converged\": " + std::string(ck.summary.converged ? "true" : "false");
  s += "}\n}\n";
  atomic_write_file(path, s);
}

Checkpoint load_checkpoint(const std::string& path) {
  json j = parse_json(read_file(path), "checkpoint '" + path + "'");
  if (!j.is_object()) throw Error(Err::IoError, "checkpoint must be a JSON object");
  for (const char* k : {"format_version", "layout", "role", "cfg", "theta", "target",
                        "summary"})
    if (!j.contains(k))
      throw Error(Err::IoError, std::string("checkpoint missing field '") + k + "'");
  Checkpoint ck;
  ck.format_version = j["format_version"].get<std::string>();
  if (ck.format_version != "cvqd-ckpt-1")
    throw Error(Err::IoError,
                "unsupported checkpoint format_version '" + ck.format_version + "'");
  ck.layout = j["layout"].get<std::string>();
  if (ck.layout != "cvqnn-16p-v1")
    throw Error(Err::IoError, "unsupported checkpoint layout '" + ck.layout + "'");
  ck.role = j["role"].get<std::string>();
  if (ck.role != "generative" && ck.role != "restoration")
    throw Error(Err::IoError, "unknown checkpoint role '" + ck.role + "'");
  try {
    ck.cfg = cfg_from_json(j["cfg"]);
  } catch (const json::exception&) {
    throw Error(Err::IoError, "checkpoint cfg has a wrongly typed field");
  }
  const json& th = j["theta"];
  if (!th.is_array() ||
      th.size() != size_t(denoiser::kParamsPerLayer) * size_t(ck.cfg.layers))
    throw Error(Err::IoError, "checkpoint theta length does not match layers");
  ck.theta.resize(long(th.size()));
  for (size_t i = 0; i < th.size(); ++i) {
    if (!th[i].is_number()) throw Error(Err::IoError, "checkpoint theta must be numeric");
    ck.theta[long(i)] = th[i].get<double>();
  }
  const json& tg = j["target"];
  if (tg.is_null()) {
    ck.target = TargetDescriptor{};
  } else if (tg.is_object()) {
    try {
      ck.target.kind = tg.at("kind").get<std::string>();
      ck.target.alpha_re = tg.at("alpha_re").get<double>();
      ck.target.alpha_im = tg.at("alpha_im").get<double>();
      ck.target.fock_n = tg.at("fock_n").get<int>();
      ck.target.parity = tg.at("parity").get<std::string>();
      ck.target.squeeze_r = tg.at("squeeze_r").get<double>();
    } catch (const json::exception&) {
      throw Error(Err::IoError, "checkpoint target descriptor is malformed");
    }
  } else {
    throw Error(Err::IoError, "checkpoint target must be an object or null");
  }
  try {
    const json& sm = j["summary"];
    ck.summary.final_loss = sm.at("final_loss").get<double>();
    ck.summary.best_loss = sm.at("best_loss").get<double>();
    ck.summary.iterations = sm.at("iterations").get<int>();
    ck.summary.converged = sm.at("converged").get<bool>();
  } catch (const json::exception&) {
    throw Error(Err::IoError, "checkpoint summary is malformed");
  }
  return ck;
}

std::string metrics_csv(const std::vector<trainer::MetricsRow>& rows) {
  std::string s = "iter,lr,loss_total,loss_t0,mean_step_fidelity,mean_trace_penalty,wall_ms\n";
  for (const auto& r : rows) {
    s += std::to_string(r.iter);
    s += ',';
    s += format_g17(r.lr);
    s += ',';
    s += format_g17(r.loss_total);
    s += ',';
    s += format_g17(r.loss_t0);
    s += ',';
    s += format_g17(r.mean_step_fidelity);
    s += ',';
    s += format_g17(r.mean_trace_penalty);
    s += ',';
    s += format_g17(r.wall_ms);
    s += '\n';
  }
  return s;
}

std::string curve_csv(const std::vector<std::pair<int, double>>& rows,
                      const std::string& value_column) {
  std::string s = "t," + value_column + "\n";
  for (const auto& [t, v] : rows) {
    s += std::to_string(t);
    s += ',';
    s += format_g17(v);
    s += '\n';
  }
  return s;
}

std::string schedule_csv(const diffusion::NoiseSchedule& sched) {
  std::string s = "t,eta_t,eta_bar_t\n0,1,1\n";
  for (int t = 1; t <= sched.T; ++t) {
    s += std::to_string(t);
    s += ',';
    s += format_g17(sched.eta_at(t));
    s += ',';
    s += format_g17(sched.eta_bar_at(t));
    s += '\n';
  }
  return s;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "param,nbar,fidelity,iters\n";
  for (const auto& r : rows) {
    s += format_g17(r.param);
    s += ',';
    s += format_g17(r.nbar);
    s += ',';
    s += format_g17(r.fidelity);
    s += ',';
    s += std::to_string(r.iters);
    s += '\n';
  }
  return s;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void save_manifest(const std::string& path, const RunManifest& mf) {
  std::string s = "{\n  \"command\": \"" + mf.command + "\",\n";
  s += "  \"config\": \"" + mf.config_path + "\",\n";
  s += "  \"seed\": " + std::to_string(mf.seed) + ",\n";
  s += "  \"started_at\": \"" + mf.started_at + "\",\n";
  s += "  \"finished_at\": \"" + mf.finished_at + "\",\n";
  s += "  \"outputs\": [";
  for (size_t i = 0; i < mf.outputs.size(); ++i) {
    s += i ? ", " : "";
    s += "\"" + mf.outputs[i] + "\"";
  }
  s += "]\n}\n";
  atomic_write_file(path, s);
}

}  // namespace cvqd::io
