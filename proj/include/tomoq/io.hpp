#pragma once

#include <cctype>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomoq/matrix.hpp"
#include "tomoq/prob.hpp"
#include "tomoq/quantum.hpp"
#include "tomoq/report.hpp"
#include "tomoq/reshape.hpp"
#include "tomoq/sweep.hpp"
#include "tomoq/version.hpp"

namespace tomoq {

// Ordered JSON keeps key insertion order, so serialized output is
// byte-reproducible run to run.
using ojson = nlohmann::ordered_json;

inline ojson matrix_to_json(const ComplexMatrix& m) {
  ojson re = ojson::array();
  ojson im = ojson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ojson re_row = ojson::array();
    ojson im_row = ojson::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  ojson out;
  out["re"] = std::move(re);
  out["im"] = std::move(im);
  return out;
}

inline ComplexMatrix matrix_from_json(const ojson& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw std::runtime_error("matrix: expected an object with 're' and 'im'");
  const ojson& re = j.at("re");
  const ojson& im = j.at("im");
  if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty())
    throw std::runtime_error("matrix: 're' and 'im' must be equal-shaped nested arrays");
  const std::size_t rows = re.size();
  std::size_t cols = 0;
  ComplexMatrix m;
  for (std::size_t i = 0; i < rows; ++i) {
    const ojson& rrow = re.at(i);
    const ojson& irow = im.at(i);
    if (!rrow.is_array() || !irow.is_array() || rrow.size() != irow.size())
      throw std::runtime_error("matrix: 're' and 'im' must be equal-shaped nested arrays");
    if (i == 0) {
      cols = rrow.size();
      if (cols == 0) throw std::runtime_error("matrix: empty rows");
      m = ComplexMatrix(rows, cols);
    } else if (rrow.size() != cols) {
      throw std::runtime_error("matrix: ragged rows");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!rrow.at(k).is_number() || !irow.at(k).is_number())
        throw std::runtime_error("matrix: entries must be numbers");
      m(i, k) = Complex{rrow.at(k).get<double>(), irow.at(k).get<double>()};
    }
  }
  return m;
}

inline ojson density_to_json(const DensityMatrix& rho) {
  ojson out;
  out["dims"] = rho.dims();
  const ojson m = matrix_to_json(rho.mat());
  out["re"] = m.at("re");
  out["im"] = m.at("im");
  return out;
}

inline DensityMatrix density_from_json(const ojson& j) {
  ComplexMatrix m = matrix_from_json(j);
  std::vector<std::size_t> dims;
  if (j.contains("dims")) {
    if (!j.at("dims").is_array() || j.at("dims").empty())
      throw std::runtime_error("density matrix: 'dims' must be a nonempty array");
    for (const ojson& d : j.at("dims")) {
      if (!d.is_number_unsigned() || d.get<std::size_t>() == 0)
        throw std::runtime_error("density matrix: 'dims' entries must be positive integers");
      dims.push_back(d.get<std::size_t>());
    }
  } else {
    dims.push_back(m.rows());
  }
  try {
    return DensityMatrix(std::move(m), std::move(dims));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("density matrix: ") + e.what());
  }
}

inline UnitaryMatrix unitary_from_json(const ojson& j) {
  try {
    return UnitaryMatrix(matrix_from_json(j));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("unitary matrix: ") + e.what());
  }
}

inline ojson prob_to_json(const ProbVector& p) {
  return ojson(p.components());
}

inline ProbVector prob_from_json(const ojson& j) {
  if (!j.is_array() || j.empty())
    throw std::runtime_error("probability vector: expected a nonempty flat array");
  std::vector<double> c;
  c.reserve(j.size());
  for (const ojson& v : j) {
    if (!v.is_number()) throw std::runtime_error("probability vector: entries must be numbers");
    c.push_back(v.get<double>());
  }
  try {
    return ProbVector(std::move(c));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("probability vector: ") + e.what());
  }
}

inline ojson grid_to_json(const GridView& g) {
  ojson entries = ojson::array();
  for (std::size_t r = 0; r < g.rows(); ++r) {
    ojson row = ojson::array();
    for (std::size_t c = 0; c < g.cols(); ++c) row.push_back(g.at(r, c));
    entries.push_back(std::move(row));
  }
  ojson out;
  out["shape"] = {g.rows(), g.cols()};
  out["entries"] = std::move(entries);
  return out;
}

inline GridView grid_from_json(const ojson& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("entries"))
    throw std::runtime_error("grid: expected an object with 'shape' and 'entries'");
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 2) throw std::runtime_error("grid: shape must have two extents");
  std::vector<double> flat;
  for (const ojson& row : j.at("entries"))
    for (const ojson& v : row) flat.push_back(v.get<double>());
  try {
    return GridView(shape[0], shape[1], std::move(flat));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("grid: ") + e.what());
  }
}

inline ojson cube_to_json(const CubeView& c) {
  ojson planes = ojson::array();
  for (std::size_t i = 0; i < c.shape()[0]; ++i) {
    ojson plane = ojson::array();
    for (std::size_t j = 0; j < c.shape()[1]; ++j) {
      ojson row = ojson::array();
      for (std::size_t k = 0; k < c.shape()[2]; ++k) row.push_back(c.at(i, j, k));
      plane.push_back(std::move(row));
    }
    planes.push_back(std::move(plane));
  }
  ojson out;
  out["shape"] = {c.shape()[0], c.shape()[1], c.shape()[2]};
  out["entries"] = std::move(planes);
  return out;
}

inline CubeView cube_from_json(const ojson& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("entries"))
    throw std::runtime_error("cube: expected an object with 'shape' and 'entries'");
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 3) throw std::runtime_error("cube: shape must have three extents");
  std::vector<double> flat;
  for (const ojson& plane : j.at("entries"))
    for (const ojson& row : plane)
      for (const ojson& v : row) flat.push_back(v.get<double>());
  try {
    return CubeView({shape[0], shape[1], shape[2]}, std::move(flat));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("cube: ") + e.what());
  }
}

inline ojson report_to_json(const CheckReport& r) {
  ojson out;
  out["inequality_id"] = r.inequality_id;
  out["lhs"] = r.lhs;
  out["rhs"] = r.rhs;
  out["margin"] = r.margin;
  out["tol"] = r.tol;
  out["pass"] = r.pass;
  out["degenerate_flag"] = r.degenerate_flag;
  out["conjectural"] = r.conjectural;
  ojson w;
  if (r.witness.seed) w["seed"] = *r.witness.seed;
  if (!r.witness.state.empty()) w["state"] = r.witness.state;
  if (!r.witness.unitary.empty()) w["unitary"] = r.witness.unitary;
  if (r.witness.q) w["q"] = *r.witness.q;
  out["witness"] = std::move(w);
  ojson extra;
  for (const auto& [key, value] : r.extra) extra[key] = value;
  out["extra"] = std::move(extra);
  return out;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// stoull silently wraps negative input, so unsigned fields go through here.
inline unsigned long long parse_unsigned(const std::string& s) {
  if (s.find('-') != std::string::npos)
    throw std::invalid_argument("negative value");
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

} // namespace detail

// Sweep configuration file: one `key = value` assignment per line, full-line
// comments starting with '#', blank lines ignored.  Keys: sample_count,
// master_seed, dims (required); rank, q_list, inequalities, tolerance
// (optional).  Errors carry the file name and line number.
inline SweepConfig parse_sweep_config(const std::string& text, const std::string& filename) {
  SweepConfig cfg;
  bool has_samples = false, has_seed = false, has_dims = false;
  std::vector<std::string> seen;

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = filename + ":" + std::to_string(lineno) + ": ";
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(where + "expected 'key = value'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::runtime_error(where + "expected 'key = value'");
    for (const std::string& s : seen)
      if (s == key) throw std::runtime_error(where + "duplicate key '" + key + "'");
    seen.push_back(key);

    try {
      if (key == "sample_count") {
        cfg.sample_count = detail::parse_unsigned(value);
        has_samples = true;
      } else if (key == "master_seed") {
        cfg.master_seed = detail::parse_unsigned(value);
        has_seed = true;
      } else if (key == "dims") {
        cfg.dims.clear();
        for (const std::string& d : detail::split_list(value))
          cfg.dims.push_back(detail::parse_unsigned(d));
        if (cfg.dims.empty()) throw std::runtime_error(where + "empty list for 'dims'");
        has_dims = true;
      } else if (key == "rank") {
        cfg.rank = detail::parse_unsigned(value);
      } else if (key == "q_list") {
        cfg.q_list.clear();
        for (const std::string& q : detail::split_list(value))
          cfg.q_list.push_back(std::stod(q));
        if (cfg.q_list.empty()) throw std::runtime_error(where + "empty list for 'q_list'");
      } else if (key == "inequalities") {
        cfg.inequalities = detail::split_list(value);
      } else if (key == "tolerance") {
        cfg.tolerance = std::stod(value);
      } else {
        throw std::runtime_error(where + "unknown key '" + key + "'");
      }
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception&) {
      throw std::runtime_error(where + "invalid value for '" + key + "'");
    }
  }
  if (!has_samples) throw std::runtime_error(filename + ": missing required key 'sample_count'");
  if (!has_seed) throw std::runtime_error(filename + ": missing required key 'master_seed'");
  if (!has_dims) throw std::runtime_error(filename + ": missing required key 'dims'");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(filename + ": " + e.what());
  }
  return cfg;
}

inline ojson config_to_json(const SweepConfig& cfg) {
  ojson out;
  out["sample_count"] = cfg.sample_count;
  out["master_seed"] = cfg.master_seed;
  out["dims"] = cfg.dims;
  out["rank"] = cfg.rank == 0 ? cfg.hilbert_dim() : cfg.rank;
  out["q_list"] = cfg.q_list;
  out["inequalities"] =
      cfg.inequalities.empty() ? applicable_inequalities(cfg.dims) : cfg.inequalities;
  if (cfg.tolerance) out["tolerance"] = *cfg.tolerance;
  return out;
}

inline std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Run manifest: configuration echo, per-id summary and the full report list.
// Identical runs differ only in the timestamp field.
inline ojson build_manifest(const std::string& command, const SweepConfig& cfg,
                            const SweepResult& result) {
  ojson out;
  out["command"] = command;
  out["version"] = version_string;
  out["timestamp"] = iso8601_utc_now();
  out["master_seed"] = cfg.master_seed;
  out["config"] = config_to_json(cfg);
  ojson summary = ojson::array();
  for (const SweepSummaryRow& row : result.summary) {
    ojson r;
    r["inequality_id"] = row.inequality_id;
    r["evaluations"] = row.evaluations;
    r["failures"] = row.failures;
    r["min_margin"] = row.min_margin;
    summary.push_back(std::move(r));
  }
  out["summary"] = std::move(summary);
  ojson results = ojson::array();
  for (const CheckReport& r : result.reports) results.push_back(report_to_json(r));
  out["results"] = std::move(results);
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

inline ojson parse_json_file(const std::string& path) {
  try {
    return ojson::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
}

} // namespace tomoq
