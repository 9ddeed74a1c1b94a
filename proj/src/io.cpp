#include "cssep/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cssep {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedFile, what); }

const json& field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) malformed(std::string("missing key \"") + key + "\"");
  return *it;
}

std::vector<double> number_array(const json& value, const char* key) {
  if (!value.is_array()) malformed(std::string("\"") + key + "\" must be an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_number()) malformed(std::string("\"") + key + "\" must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void check_header(const json& doc) {
  if (!doc.is_object()) malformed("top-level value must be an object");
  const auto& format = field(doc, "format");
  if (!format.is_string()) malformed("\"format\" must be a string");
  if (format.get<std::string>() != kFormatVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "format \"" + format.get<std::string>() + "\" is not " + kFormatVersion);
  }
}

int read_n(const json& doc) {
  const auto& n = field(doc, "n");
  if (!n.is_number_integer()) malformed("\"n\" must be an integer");
  const auto value = n.get<long long>();
  if (value < 2 || value > 1 << 20) throw Error(ErrorCode::DimensionMismatch, "\"n\" out of range");
  return static_cast<int>(value);
}

// Returns true when any vector had to be normalized.
bool read_weighted_vectors(const json& doc, int n, Vector& weights, Matrix& vectors) {
  const auto w = number_array(field(doc, "weights"), "weights");
  const auto& vs = field(doc, "vectors");
  if (!vs.is_array()) malformed("\"vectors\" must be an array of arrays");
  if (vs.size() != w.size()) {
    malformed("\"weights\" has " + std::to_string(w.size()) + " entries but \"vectors\" has " +
              std::to_string(vs.size()));
  }
  weights = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
  vectors.resize(n, static_cast<Eigen::Index>(vs.size()));
  bool normalized = false;
  for (std::size_t m = 0; m < vs.size(); ++m) {
    const auto x = number_array(vs[m], "vectors");
    if (x.size() != static_cast<std::size_t>(n)) {
      throw Error(ErrorCode::DimensionMismatch,
                  "vector " + std::to_string(m) + " has length " + std::to_string(x.size()) + ", expected " +
                      std::to_string(n));
    }
    vectors.col(static_cast<Eigen::Index>(m)) = Eigen::Map<const Vector>(x.data(), n);
    if (std::abs(vectors.col(static_cast<Eigen::Index>(m)).norm() - 1.0) > kUnitTolerance) normalized = true;
  }
  return normalized;
}

json weighted_vectors_json(const Vector& weights, const Matrix& vectors) {
  json w = json::array();
  json v = json::array();
  for (Eigen::Index m = 0; m < weights.size(); ++m) {
    w.push_back(weights[m]);
    json x = json::array();
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) x.push_back(vectors(i, m));
    v.push_back(std::move(x));
  }
  return json{{"weights", std::move(w)}, {"vectors", std::move(v)}};
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) malformed("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    malformed(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

json form_to_json(const QuarticForm& form) {
  json doc{{"format", kFormatVersion}, {"n", form.n()}, {"repr", to_string(form.representation())}};
  if (const auto* lr = form.as_low_rank()) {
    const json payload = weighted_vectors_json(lr->weights, lr->vectors);
    doc["weights"] = payload["weights"];
    doc["vectors"] = payload["vectors"];
  } else if (const auto* sk = form.as_sum_kernel()) {
    doc["phi"] = sk->phi;
  } else {
    doc["entries"] = form.as_dense()->entries;
  }
  return doc;
}

json atoms_to_json(const AtomList& atoms) {
  const json payload = weighted_vectors_json(atoms.weights(), [&] {
    Matrix X(atoms.n(), static_cast<Eigen::Index>(atoms.size()));
    for (std::size_t i = 0; i < atoms.size(); ++i) X.col(static_cast<Eigen::Index>(i)) = atoms.atoms()[i].x;
    return X;
  }());
  return json{{"format", kFormatVersion},   {"n", atoms.n()},
              {"repr", "atoms"},            {"mode", to_string(atoms.mode())},
              {"weights", payload["weights"]}, {"vectors", payload["vectors"]}};
}

FormFile form_from_json(const json& doc) {
  check_header(doc);
  const int n = read_n(doc);
  const auto& repr = field(doc, "repr");
  if (!repr.is_string()) malformed("\"repr\" must be a string");
  const auto kind = repr.get<std::string>();
  if (kind == "lowrank" || kind == "atoms") {
    Vector weights;
    Matrix vectors;
    const bool normalized = read_weighted_vectors(doc, n, weights, vectors);
    return {QuarticForm::low_rank(n, std::move(weights), std::move(vectors)), normalized};
  }
  if (kind == "dense") {
    auto entries = number_array(field(doc, "entries"), "entries");
    const auto expected = static_cast<std::size_t>(n) * n * n * n;
    if (entries.size() != expected) {
      malformed("dense payload has " + std::to_string(entries.size()) + " entries, expected " +
                std::to_string(expected));
    }
    return {QuarticForm::dense(n, std::move(entries)), false};
  }
  if (kind == "sumkernel") {
    auto phi = number_array(field(doc, "phi"), "phi");
    if (phi.size() != static_cast<std::size_t>(4 * n - 3)) {
      malformed("sum-kernel payload has " + std::to_string(phi.size()) + " entries, expected " +
                std::to_string(4 * n - 3));
    }
    return {QuarticForm::sum_kernel(n, std::move(phi)), false};
  }
  malformed("unknown repr \"" + kind + "\"");
}

AtomFile atoms_from_json(const json& doc) {
  check_header(doc);
  const int n = read_n(doc);
  const auto& repr = field(doc, "repr");
  if (!repr.is_string() || (repr.get<std::string>() != "atoms" && repr.get<std::string>() != "lowrank")) {
    malformed("atom files need \"repr\": \"atoms\"");
  }
  FeasibleSet mode = FeasibleSet::Cone;
  if (const auto it = doc.find("mode"); it != doc.end()) {
    if (!it->is_string()) malformed("\"mode\" must be a string");
    const auto m = it->get<std::string>();
    if (m == "convex") {
      mode = FeasibleSet::Convex;
    } else if (m != "cone") {
      malformed("unknown mode \"" + m + "\"");
    }
  }
  Vector weights;
  Matrix vectors;
  const bool normalized = read_weighted_vectors(doc, n, weights, vectors);
  AtomFile out{AtomList(n, mode), normalized};
  for (Eigen::Index m = 0; m < weights.size(); ++m) {
    if (weights[m] < 0.0) malformed("atom weights must be nonnegative");
    out.atoms.insert(weights[m], vectors.col(m));
  }
  return out;
}

std::string dump(const json& doc) { return doc.dump() + "\n"; }

FormFile read_form(const std::filesystem::path& path) { return form_from_json(parse_file(path)); }

AtomFile read_atoms(const std::filesystem::path& path) { return atoms_from_json(parse_file(path)); }

void write_form(const std::filesystem::path& path, const QuarticForm& form) { write_text(path, dump(form_to_json(form))); }

void write_atoms(const std::filesystem::path& path, const AtomList& atoms) {
  write_text(path, dump(atoms_to_json(atoms)));
}

}  // namespace cssep
