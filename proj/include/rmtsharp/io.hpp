#pragma once
// Serialization: the plain-text matrix format, the fixed-header record CSV
// (byte-deterministic given identical inputs), JSON config ingestion with
// key=value overrides, and JSON rendering of reports and aggregates.
//
// Float policy: CSV cells use shortest round-trip decimals via
// std::to_chars; infinities are the literal "inf"/"-inf"; absent optionals
// are empty cells. JSON encodes non-finite values as the strings "inf" /
// "-inf" since JSON has no numeric infinity.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmtsharp/errors.hpp"
#include "rmtsharp/experiments.hpp"
#include "rmtsharp/matrix.hpp"
#include "rmtsharp/spectral.hpp"
#include "rmtsharp/structure.hpp"

namespace rmtsharp {

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Number formatting.

namespace detail {

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& context) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw io_error("malformed number '" + s + "' in " + context);
  return v;
}

// JSON has no infinity; encode non-finite doubles as strings.
inline nlohmann::json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrix text format: "rows cols nnz" header, then 1-indexed "i j" entry
// lines in row-major order.

inline void emit_matrix(const SparseBinaryMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (const auto& [i, j] : a.entries_row_major()) out << i + 1 << ' ' << j + 1 << '\n';
  if (!out) throw io_error("write failed for '" + path + "'");
}

inline SparseBinaryMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  auto fail = [&](int line_no, const std::string& what) -> io_error {
    return io_error(path + ":" + std::to_string(line_no) + ": " + what);
  };
  std::string line;
  int line_no = 0;

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw fail(1, "missing header line 'rows cols nnz'");
  long long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> rows >> cols >> nnz) || (hs >> extra))
      throw fail(line_no, "header must be exactly 'rows cols nnz'");
  }
  if (rows < 1 || cols < 1 || nnz < 0)
    throw fail(line_no, "header values out of range");

  std::vector<std::pair<int, int>> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  std::set<std::pair<int, int>> seen;
  for (long long e = 0; e < nnz; ++e) {
    if (!next_line()) throw fail(line_no + 1, "expected " + std::to_string(nnz) +
                                                  " entries, found " + std::to_string(e));
    std::istringstream es(line);
    long long i = 0, j = 0;
    std::string extra;
    if (!(es >> i >> j) || (es >> extra))
      throw fail(line_no, "entry line must be exactly 'i j'");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw fail(line_no, "entry (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") outside the declared " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " shape");
    if (!seen.emplace(static_cast<int>(i), static_cast<int>(j)).second)
      throw fail(line_no, "duplicate entry (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
    entries.emplace_back(static_cast<int>(i) - 1, static_cast<int>(j) - 1);
  }
  if (next_line()) throw fail(line_no, "trailing content after the declared entries");
  return SparseBinaryMatrix::from_entries(static_cast<int>(rows), static_cast<int>(cols),
                                          std::move(entries));
}

// ---------------------------------------------------------------------------
// Record CSV.

inline const char* csv_header() {
  return "schema_version,experiment,model,n,p,k,trial,seed,stream,omega0,zero_rows,"
         "zero_cols,invertible,s_min,s2,s_max,centered_norm,sigma,sigma_tilde,lambda0,"
         "eigvec_dev,khat,light_count,prop_no_heavy,prop_light_disjoint,prop_light_meets,"
         "prop_fold_overlap,prop_extension,prop_fold_size,ell0,rho,mc_zero_col,"
         "formula_zero_col,dist_quad,dist_proj,dist_gap,dist_exact,hs_norm_inv,hs_freq1,"
         "hs_freq2,wall_ms";
}

namespace detail {

inline void csv_cell(std::string& row, const std::optional<double>& v) {
  row.push_back(',');
  if (v) row += format_double(*v);
}
inline void csv_cell(std::string& row, const std::optional<int>& v) {
  row.push_back(',');
  if (v) row += std::to_string(*v);
}
inline void csv_cell(std::string& row, const std::optional<bool>& v) {
  row.push_back(',');
  if (v) row.push_back(*v ? '1' : '0');
}

}  // namespace detail

// Rows arrive already sorted by (n, p, model, trial) from run_experiment;
// wall-clock cells are emitted only when the config opted in, so reruns of
// one config produce byte-identical files.
inline void emit_csv(const std::vector<TrialRecord>& records, const std::string& path,
                     bool record_wall_time = false) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << csv_header() << '\n';
  std::string row;
  for (const TrialRecord& r : records) {
    row.clear();
    row += std::to_string(kSchemaVersion);
    row.push_back(',');
    row += to_string(r.experiment);
    row.push_back(',');
    row += to_string(r.model);
    row.push_back(',');
    row += std::to_string(r.n);
    row.push_back(',');
    row += detail::format_double(r.p);
    row.push_back(',');
    row += detail::format_double(r.k);
    row.push_back(',');
    row += std::to_string(r.trial);
    row.push_back(',');
    row += std::to_string(r.seed);
    row.push_back(',');
    row += std::to_string(r.stream);
    detail::csv_cell(row, r.omega0);
    detail::csv_cell(row, r.zero_rows);
    detail::csv_cell(row, r.zero_cols);
    detail::csv_cell(row, r.invertible);
    detail::csv_cell(row, r.s_min);
    detail::csv_cell(row, r.s2);
    detail::csv_cell(row, r.s_max);
    detail::csv_cell(row, r.centered_norm);
    detail::csv_cell(row, r.sigma);
    detail::csv_cell(row, r.sigma_tilde);
    detail::csv_cell(row, r.lambda0);
    detail::csv_cell(row, r.eigvec_dev);
    detail::csv_cell(row, r.khat);
    detail::csv_cell(row, r.light_count);
    detail::csv_cell(row, r.prop_no_heavy);
    detail::csv_cell(row, r.prop_light_disjoint);
    detail::csv_cell(row, r.prop_light_meets);
    detail::csv_cell(row, r.prop_fold_overlap);
    detail::csv_cell(row, r.prop_extension);
    detail::csv_cell(row, r.prop_fold_size);
    detail::csv_cell(row, r.ell0);
    detail::csv_cell(row, r.rho);
    detail::csv_cell(row, r.mc_zero_col);
    detail::csv_cell(row, r.formula_zero_col);
    detail::csv_cell(row, r.dist_quad);
    detail::csv_cell(row, r.dist_proj);
    detail::csv_cell(row, r.dist_gap);
    detail::csv_cell(row, r.dist_exact);
    detail::csv_cell(row, r.hs_norm_inv);
    detail::csv_cell(row, r.hs_freq1);
    detail::csv_cell(row, r.hs_freq2);
    detail::csv_cell(row, record_wall_time ? r.wall_ms : std::optional<double>{});
    out << row << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

inline std::optional<double> cell_double(const std::string& s, const std::string& ctx) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, ctx);
}
inline std::optional<int> cell_int(const std::string& s, const std::string& ctx) {
  if (s.empty()) return std::nullopt;
  try {
    return std::stoi(s);
  } catch (const std::exception&) {
    throw io_error("malformed integer '" + s + "' in " + ctx);
  }
}
inline std::optional<bool> cell_bool(const std::string& s, const std::string& ctx) {
  if (s.empty()) return std::nullopt;
  if (s == "1") return true;
  if (s == "0") return false;
  throw io_error("malformed boolean '" + s + "' in " + ctx);
}

}  // namespace detail

inline std::vector<TrialRecord> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header())
    throw io_error(path + ": unrecognized CSV header (schema mismatch)");

  std::vector<TrialRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string ctx = path + ":" + std::to_string(line_no);
    const std::vector<std::string> c = detail::split_csv_line(line);
    if (c.size() != 41) throw io_error(ctx + ": expected 41 cells, found " +
                                       std::to_string(c.size()));
    if (c[0] != std::to_string(kSchemaVersion))
      throw io_error(ctx + ": unsupported schema_version " + c[0]);
    TrialRecord r;
    r.experiment = experiment_kind_from_string(c[1]);
    r.model = model_kind_from_string(c[2]);
    r.n = *detail::cell_int(c[3], ctx);
    r.p = detail::parse_double(c[4], ctx);
    r.k = detail::parse_double(c[5], ctx);
    r.trial = *detail::cell_int(c[6], ctx);
    r.seed = std::stoull(c[7]);
    r.stream = std::stoull(c[8]);
    r.omega0 = detail::cell_bool(c[9], ctx);
    r.zero_rows = detail::cell_int(c[10], ctx);
    r.zero_cols = detail::cell_int(c[11], ctx);
    r.invertible = detail::cell_bool(c[12], ctx);
    r.s_min = detail::cell_double(c[13], ctx);
    r.s2 = detail::cell_double(c[14], ctx);
    r.s_max = detail::cell_double(c[15], ctx);
    r.centered_norm = detail::cell_double(c[16], ctx);
    r.sigma = detail::cell_double(c[17], ctx);
    r.sigma_tilde = detail::cell_double(c[18], ctx);
    r.lambda0 = detail::cell_double(c[19], ctx);
    r.eigvec_dev = detail::cell_double(c[20], ctx);
    r.khat = detail::cell_double(c[21], ctx);
    r.light_count = detail::cell_int(c[22], ctx);
    r.prop_no_heavy = detail::cell_bool(c[23], ctx);
    r.prop_light_disjoint = detail::cell_bool(c[24], ctx);
    r.prop_light_meets = detail::cell_bool(c[25], ctx);
    r.prop_fold_overlap = detail::cell_bool(c[26], ctx);
    r.prop_extension = detail::cell_bool(c[27], ctx);
    r.prop_fold_size = detail::cell_bool(c[28], ctx);
    r.ell0 = detail::cell_int(c[29], ctx);
    r.rho = detail::cell_double(c[30], ctx);
    r.mc_zero_col = detail::cell_bool(c[31], ctx);
    r.formula_zero_col = detail::cell_double(c[32], ctx);
    r.dist_quad = detail::cell_double(c[33], ctx);
    r.dist_proj = detail::cell_double(c[34], ctx);
    r.dist_gap = detail::cell_double(c[35], ctx);
    r.dist_exact = detail::cell_bool(c[36], ctx);
    r.hs_norm_inv = detail::cell_double(c[37], ctx);
    r.hs_freq1 = detail::cell_double(c[38], ctx);
    r.hs_freq2 = detail::cell_double(c[39], ctx);
    r.wall_ms = detail::cell_double(c[40], ctx);
    records.push_back(std::move(r));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Config ingestion.

namespace detail {

inline std::vector<double> number_or_list(const nlohmann::json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw parameter_error("config key '" + key + "' must hold numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw parameter_error("config key '" + key + "' must be a number or a list");
  }
  return out;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw parameter_error("config root must be a JSON object");
  std::set<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
  auto take = [&](const char* k) -> const nlohmann::json* {
    keys.erase(k);
    auto it = j.find(k);
    return it == j.end() ? nullptr : &*it;
  };

  ExperimentConfig cfg;
  if (const auto* v = take("schema_version"))
    if (!v->is_number_integer() || v->get<int>() != kSchemaVersion)
      throw parameter_error("unsupported config schema_version");
  if (const auto* v = take("experiment"))
    cfg.experiment = experiment_kind_from_string(v->get<std::string>());
  if (const auto* v = take("models")) {
    cfg.models.clear();
    if (v->is_string()) {
      cfg.models.push_back(model_kind_from_string(v->get<std::string>()));
    } else if (v->is_array()) {
      for (const auto& m : *v)
        cfg.models.push_back(model_kind_from_string(m.get<std::string>()));
    } else {
      throw parameter_error("config key 'models' must be a string or a list of strings");
    }
  }
  if (const auto* v = take("n")) {
    cfg.n.clear();
    for (double d : detail::number_or_list(*v, "n")) cfg.n.push_back(static_cast<int>(d));
  }
  if (const auto* v = take("k")) cfg.density.k = detail::number_or_list(*v, "k");
  if (const auto* v = take("p")) cfg.density.p = detail::number_or_list(*v, "p");
  if (const auto* v = take("log_factor")) cfg.density.log_factor = v->get<double>();
  if (const auto* v = take("trials")) cfg.trials = v->get<int>();
  if (const auto* v = take("seed")) cfg.seed = v->get<std::uint64_t>();
  if (const auto* v = take("record_spectra")) cfg.record_spectra = v->get<bool>();
  if (const auto* v = take("record_centered")) cfg.record_centered = v->get<bool>();
  if (const auto* v = take("record_eigen")) cfg.record_eigen = v->get<bool>();
  if (const auto* v = take("record_wall_time")) cfg.record_wall_time = v->get<bool>();
  if (const auto* v = take("tol")) cfg.tol = v->get<double>();
  if (const auto* v = take("n_dense")) cfg.n_dense = v->get<int>();
  if (const auto* v = take("max_iter")) cfg.max_iter = v->get<int>();
  if (const auto* v = take("threads")) cfg.threads = v->get<int>();
  if (const auto* v = take("dist_nmin")) cfg.dist_nmin = v->get<int>();
  if (const auto* v = take("dist_nmax")) cfg.dist_nmax = v->get<int>();
  if (const auto* v = take("hs_draws")) cfg.hs_draws = v->get<int>();
  if (const auto* v = take("hs_eps1")) cfg.hs_eps1 = v->get<double>();
  if (const auto* v = take("hs_eps2")) cfg.hs_eps2 = v->get<double>();
  if (const auto* v = take("c0")) cfg.c0 = v->get<double>();
  if (const auto* v = take("output")) cfg.output = v->get<std::string>();

  if (const auto* v = take("structure")) {
    if (!v->is_object()) throw parameter_error("config key 'structure' must be an object");
    std::set<std::string> skeys;
    for (auto it = v->begin(); it != v->end(); ++it) skeys.insert(it.key());
    auto stake = [&](const char* k) -> const nlohmann::json* {
      skeys.erase(k);
      auto it = v->find(k);
      return it == v->end() ? nullptr : &*it;
    };
    if (const auto* s = stake("delta0")) cfg.structure.delta0 = s->get<double>();
    if (const auto* s = stake("c_heavy")) cfg.structure.c_heavy = s->get<double>();
    if (const auto* s = stake("r0")) cfg.structure.r0 = s->get<int>();
    if (const auto* s = stake("c_ext")) cfg.structure.c_ext = s->get<double>();
    if (const auto* s = stake("n_sub")) cfg.structure.n_sub = s->get<int>();
    if (const auto* s = stake("exhaustive_n_max"))
      cfg.structure.exhaustive_n_max = s->get<int>();
    if (const auto* s = stake("subset_seed")) cfg.structure.subset_seed = s->get<std::uint64_t>();
    if (!skeys.empty())
      throw parameter_error("unknown key in config 'structure': " + *skeys.begin());
  }
  if (const auto* v = take("vectors")) {
    if (!v->is_object()) throw parameter_error("config key 'vectors' must be an object");
    std::set<std::string> vkeys;
    for (auto it = v->begin(); it != v->end(); ++it) vkeys.insert(it.key());
    auto vtake = [&](const char* k) -> const nlohmann::json* {
      vkeys.erase(k);
      auto it = v->find(k);
      return it == v->end() ? nullptr : &*it;
    };
    if (const auto* s = vtake("m")) cfg.vectors.m = s->get<int>();
    if (const auto* s = vtake("delta")) cfg.vectors.delta = s->get<double>();
    if (const auto* s = vtake("alpha")) cfg.vectors.alpha = s->get<double>();
    if (const auto* s = vtake("K")) cfg.vectors.K = s->get<double>();
    if (const auto* s = vtake("c_star")) cfg.vectors.c_star = s->get<double>();
    if (const auto* s = vtake("c_tilde")) cfg.vectors.c_tilde = s->get<double>();
    if (!vkeys.empty())
      throw parameter_error("unknown key in config 'vectors': " + *vkeys.begin());
  }

  if (!keys.empty()) throw parameter_error("unknown config key: " + *keys.begin());
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

// Applies one "key=value" override on top of a loaded config. Lists take
// comma-separated values; booleans accept true/false/1/0.
inline void apply_override(ExperimentConfig& cfg, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw parameter_error("override must look like key=value, got '" + spec + "'");
  const std::string key = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);

  auto as_double = [&]() {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      throw parameter_error("override '" + key + "' needs a numeric value");
    }
  };
  auto as_int = [&]() {
    try {
      return std::stoi(value);
    } catch (const std::exception&) {
      throw parameter_error("override '" + key + "' needs an integer value");
    }
  };
  auto as_bool = [&]() {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw parameter_error("override '" + key + "' needs true/false");
  };
  auto split_list = [&]() {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : value) {
      if (ch == ',') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    parts.push_back(cur);
    return parts;
  };
  auto as_double_list = [&]() {
    std::vector<double> out;
    for (const std::string& s : split_list()) {
      try {
        out.push_back(std::stod(s));
      } catch (const std::exception&) {
        throw parameter_error("override '" + key + "' needs numbers, got '" + s + "'");
      }
    }
    return out;
  };

  if (key == "experiment") cfg.experiment = experiment_kind_from_string(value);
  else if (key == "models") {
    cfg.models.clear();
    for (const std::string& s : split_list()) cfg.models.push_back(model_kind_from_string(s));
  } else if (key == "n") {
    cfg.n.clear();
    for (double d : as_double_list()) cfg.n.push_back(static_cast<int>(d));
  } else if (key == "k") {
    cfg.density = DensityRule{};
    cfg.density.k = as_double_list();
  } else if (key == "p") {
    cfg.density = DensityRule{};
    cfg.density.p = as_double_list();
  } else if (key == "log_factor") {
    cfg.density = DensityRule{};
    cfg.density.log_factor = as_double();
  } else if (key == "trials") cfg.trials = as_int();
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "record_spectra") cfg.record_spectra = as_bool();
  else if (key == "record_centered") cfg.record_centered = as_bool();
  else if (key == "record_eigen") cfg.record_eigen = as_bool();
  else if (key == "record_wall_time") cfg.record_wall_time = as_bool();
  else if (key == "tol") cfg.tol = as_double();
  else if (key == "n_dense") cfg.n_dense = as_int();
  else if (key == "max_iter") cfg.max_iter = as_int();
  else if (key == "threads") cfg.threads = as_int();
  else if (key == "dist_nmin") cfg.dist_nmin = as_int();
  else if (key == "dist_nmax") cfg.dist_nmax = as_int();
  else if (key == "hs_draws") cfg.hs_draws = as_int();
  else if (key == "hs_eps1") cfg.hs_eps1 = as_double();
  else if (key == "hs_eps2") cfg.hs_eps2 = as_double();
  else if (key == "c0") cfg.c0 = as_double();
  else if (key == "output") cfg.output = value;
  else if (key == "structure.delta0") cfg.structure.delta0 = as_double();
  else if (key == "structure.c_heavy") cfg.structure.c_heavy = as_double();
  else if (key == "structure.r0") cfg.structure.r0 = as_int();
  else if (key == "structure.c_ext") cfg.structure.c_ext = as_double();
  else if (key == "structure.n_sub") cfg.structure.n_sub = as_int();
  else if (key == "structure.exhaustive_n_max") cfg.structure.exhaustive_n_max = as_int();
  else if (key == "structure.subset_seed") cfg.structure.subset_seed = std::stoull(value);
  else if (key == "vectors.m") cfg.vectors.m = as_int();
  else if (key == "vectors.delta") cfg.vectors.delta = as_double();
  else if (key == "vectors.alpha") cfg.vectors.alpha = as_double();
  else if (key == "vectors.K") cfg.vectors.K = as_double();
  else if (key == "vectors.c_star") cfg.vectors.c_star = as_double();
  else if (key == "vectors.c_tilde") cfg.vectors.c_tilde = as_double();
  else throw parameter_error("unknown override key: " + key);
}

// ---------------------------------------------------------------------------
// JSON rendering.

inline nlohmann::json spectral_summary_to_json(const SpectralSummary& s) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  auto put = [&](const char* name, const std::optional<double>& v) {
    if (v) j[name] = detail::json_number(*v);
  };
  put("s_min", s.s_min);
  put("s2", s.s2);
  put("s_max", s.s_max);
  put("centered_norm", s.centered_norm);
  put("sigma", s.sigma);
  put("sigma_tilde", s.sigma_tilde);
  put("lambda0", s.lambda0);
  put("eigvec_dev", s.eigvec_dev);
  j["singular_exact"] = to_string(s.singular_exact);
  return j;
}

inline nlohmann::json structural_report_to_json(const StructuralReport& rep) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = rep.n;
  j["p"] = rep.p;
  j["params"] = {{"delta0", rep.params.delta0},
                 {"c_heavy", rep.params.c_heavy},
                 {"r0", rep.params.r0},
                 {"c_ext", rep.params.c_ext},
                 {"n_sub", rep.params.n_sub},
                 {"exhaustive_n_max", rep.params.exhaustive_n_max},
                 {"subset_seed", rep.params.subset_seed}};
  j["omega0"] = rep.zero.omega0;
  j["zero_rows"] = rep.zero.zero_rows;
  j["zero_cols"] = rep.zero.zero_cols;
  j["light_cols"] = rep.light_cols;
  j["light_count"] = rep.light_cols.size();
  static constexpr const char* kPropNames[6] = {"no_heavy",      "light_disjoint",
                                                "light_meets",   "fold_overlap",
                                                "extension",     "fold_size"};
  nlohmann::json props, witnesses;
  for (int i = 0; i < 6; ++i) {
    props[kPropNames[i]] = rep.props[static_cast<std::size_t>(i)];
    if (!rep.witnesses[static_cast<std::size_t>(i)].empty())
      witnesses[kPropNames[i]] = rep.witnesses[static_cast<std::size_t>(i)];
  }
  j["props"] = props;
  j["all_props"] = rep.all_props();
  if (!witnesses.is_null()) j["violations"] = witnesses;
  return j;
}

inline nlohmann::json aggregate_to_json(const AggregateReport& report) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["experiment"] = to_string(report.experiment);
  nlohmann::json groups = nlohmann::json::array();
  for (const GroupAggregate& g : report.groups) {
    nlohmann::json gj;
    gj["model"] = to_string(g.model);
    gj["n"] = g.n;
    gj["p"] = g.p;
    gj["k"] = g.k;
    gj["count"] = g.count;
    if (g.khat_q99) gj["khat_q99"] = detail::json_number(*g.khat_q99);
    if (g.ell0) gj["ell0"] = *g.ell0;
    if (g.rho) gj["rho"] = detail::json_number(*g.rho);
    nlohmann::json numeric;
    for (const auto& [name, f] : g.numeric) {
      numeric[name] = {{"count", f.count},
                       {"mean", detail::json_number(f.mean)},
                       {"q10", detail::json_number(f.q10)},
                       {"q50", detail::json_number(f.q50)},
                       {"q90", detail::json_number(f.q90)},
                       {"min", detail::json_number(f.min)},
                       {"max", detail::json_number(f.max)}};
    }
    if (!numeric.is_null()) gj["numeric"] = numeric;
    nlohmann::json events;
    for (const auto& [name, e] : g.events) {
      events[name] = {{"numer", e.numer},
                      {"denom", e.denom},
                      {"freq", detail::json_number(e.wilson.freq)},
                      {"wilson_low", detail::json_number(e.wilson.low)},
                      {"wilson_high", detail::json_number(e.wilson.high)}};
    }
    if (!events.is_null()) gj["events"] = events;
    if (g.zero_col) {
      gj["zero_col"] = {{"freq", detail::json_number(g.zero_col->freq)},
                        {"formula", detail::json_number(g.zero_col->formula)},
                        {"abs_diff", detail::json_number(g.zero_col->abs_diff)},
                        {"band3", detail::json_number(g.zero_col->band3)}};
    }
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  return j;
}

inline void emit_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace rmtsharp
