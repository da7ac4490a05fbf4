#include "io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ridgekit::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

CliError parse_error(const std::string& path, std::size_t line, const std::string& what) {
  return CliError(kParseError, path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Eigen::Index Table::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return static_cast<Eigen::Index>(j);
  }
  return -1;
}

Matrix Table::numbered(const std::string& prefix) const {
  std::vector<Eigen::Index> cols;
  for (std::size_t k = 1;; ++k) {
    const Eigen::Index c = column(prefix + std::to_string(k));
    if (c < 0) break;
    cols.push_back(c);
  }
  if (cols.empty()) throw CliError(kParseError, "no " + prefix + "1.. columns in header");
  for (const std::string& name : header) {
    if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size() &&
        std::isdigit(static_cast<unsigned char>(name[prefix.size()])) && std::stoul(name.substr(prefix.size())) > cols.size()) {
      throw CliError(kParseError, "column " + name + " is out of sequence");
    }
  }
  Matrix out(values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = values.col(cols[j]);
  return out;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kIoError, "cannot open " + path);

  Table table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split(line);
    if (table.header.empty()) {
      for (const std::string& name : fields) {
        if (name.empty()) throw parse_error(path, lineno, "empty column name");
      }
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw parse_error(path, lineno, "expected " + std::to_string(table.header.size()) + " fields, got " +
                                          std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string& text = fields[j];
      const char* end = text.data() + text.size();
      const auto [ptr, ec] = std::from_chars(text.data(), end, row[j]);
      if (text.empty() || ec != std::errc() || ptr != end) {
        throw parse_error(path, lineno, "invalid number '" + text + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw CliError(kIoError, "read failed: " + path);
  if (table.header.empty()) throw parse_error(path, lineno, "missing header");
  if (rows.empty()) throw parse_error(path, lineno, "no data rows");

  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return table;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError(kIoError, "cannot write " + path);
  out << contents;
  out.close();
  if (!out) throw CliError(kIoError, "write failed: " + path);
}

std::string csv_text(const std::vector<std::string>& header, const Matrix& values) {
  std::ostringstream os;
  for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
  os << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) os << (j ? "," : "") << format_double(values(i, j));
    os << '\n';
  }
  return os.str();
}

std::vector<std::string> numbered_header(const std::string& prefix, Eigen::Index count) {
  std::vector<std::string> h;
  for (Eigen::Index k = 1; k <= count; ++k) h.push_back(prefix + std::to_string(k));
  return h;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kIoError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CliError(kParseError, path + ": " + e.what());
  }
}

void write_json(const std::string& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

Json model_to_json(const RidgeModel& model, double residual_final) {
  const Matrix& u = model.u.matrix();
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < u.cols(); ++j) row.push_back(u(i, j));
    rows.push_back(row);
  }
  const PolyModel& p = model.poly;
  return {
      {"version", kModelVersion},
      {"m", u.rows()},
      {"n", u.cols()},
      {"N", p.basis.degree},
      {"U", rows},
      {"multi_indices", p.basis.indices},
      {"theta", std::vector<double>(p.theta.data(), p.theta.data() + p.theta.size())},
      {"y_scale", std::vector<double>(p.y_scale.data(), p.y_scale.data() + p.y_scale.size())},
      {"init", model.init},
      {"seed", model.seed},
      {"residual_final", residual_final},
  };
}

RidgeModel model_from_json(const Json& doc) {
  try {
    if (doc.at("version").get<std::string>() != kModelVersion) {
      throw CliError(kParseError, "unsupported model version " + doc.at("version").dump());
    }
    const auto m = doc.at("m").get<std::size_t>();
    const auto n = doc.at("n").get<std::size_t>();
    const auto degree = doc.at("N").get<std::size_t>();
    const auto rows = doc.at("U").get<std::vector<std::vector<double>>>();
    if (rows.size() != m) throw CliError(kParseError, "model U has wrong row count");
    Matrix u(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i) {
      if (rows[i].size() != n) throw CliError(kParseError, "model U has wrong column count");
      for (std::size_t j = 0; j < n; ++j) u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    MultiIndexBasis basis = multi_indices(n, degree);
    if (doc.at("multi_indices").get<std::vector<MultiIndex>>() != basis.indices) {
      throw CliError(kParseError, "model multi_indices do not match a total-degree basis");
    }
    const auto theta = doc.at("theta").get<std::vector<double>>();
    const auto scale = doc.at("y_scale").get<std::vector<double>>();
    if (theta.size() != basis.size() || scale.size() != n) throw CliError(kParseError, "model coefficient sizes");
    PolyModel poly{std::move(basis), Eigen::Map<const Vector>(theta.data(), static_cast<Eigen::Index>(theta.size())),
                   Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(n))};
    return RidgeModel{Frame::from_orthonormal(u), std::move(poly), {}, doc.value("init", std::string()),
                      doc.value("seed", std::uint64_t{0})};
  } catch (const nlohmann::json::exception& e) {
    throw CliError(kParseError, std::string("malformed model: ") + e.what());
  } catch (const Error& e) {
    throw CliError(kParseError, std::string("malformed model: ") + e.what());
  }
}

Json spectrum_to_json(const Spectrum& spectrum, std::optional<std::size_t> suggested_n,
                                const BootstrapSummary* bootstrap) {
  const Vector& ev = spectrum.eigenvalues;
  Json columns = Json::array();
  for (Eigen::Index j = 0; j < spectrum.eigenvectors.cols(); ++j) {
    const Vector c = spectrum.eigenvectors.col(j);
    columns.push_back(std::vector<double>(c.data(), c.data() + c.size()));
  }
  Json doc{
      {"m", ev.size()},
      {"eigenvalues", std::vector<double>(ev.data(), ev.data() + ev.size())},
      {"eigenvectors", columns},
  };
  if (suggested_n) {
    doc["suggested_n"] = *suggested_n;
  } else {
    doc["suggested_n"] = nullptr;
    doc["warning"] = "no spectral gap";
  }
  if (bootstrap != nullptr) {
    auto ranges = [](const std::vector<Range>& rs) {
      Json out = Json::array();
      for (const Range& r : rs) out.push_back({{"min", r.min}, {"mean", r.mean}, {"max", r.max}});
      return out;
    };
    doc["bootstrap"] = {
        {"B", bootstrap->replicates},
        {"seed", bootstrap->seed},
        {"eigen_ranges", ranges(bootstrap->eigenvalues)},
        {"subspace_ranges", ranges(bootstrap->subspace_distance)},
    };
  }
  return doc;
}

SpectrumFile spectrum_from_json(const Json& doc) {
  try {
    const auto m = doc.at("m").get<std::size_t>();
    const auto values = doc.at("eigenvalues").get<std::vector<double>>();
    const auto columns = doc.at("eigenvectors").get<std::vector<std::vector<double>>>();
    if (values.size() != m || columns.size() != m) throw CliError(kParseError, "spectrum sizes disagree with m");
    SpectrumFile out;
    out.spectrum.eigenvalues = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(m));
    out.spectrum.eigenvectors.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
      if (columns[j].size() != m) throw CliError(kParseError, "eigenvector length disagrees with m");
      out.spectrum.eigenvectors.col(static_cast<Eigen::Index>(j)) =
          Eigen::Map<const Vector>(columns[j].data(), static_cast<Eigen::Index>(m));
    }
    if (doc.contains("suggested_n") && !doc["suggested_n"].is_null()) {
      out.suggested_n = doc["suggested_n"].get<std::size_t>();
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw CliError(kParseError, std::string("malformed spectrum: ") + e.what());
  }
}

}  // namespace ridgekit::cli
