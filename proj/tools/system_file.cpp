#include "system_file.hpp"

#include <fstream>
#include <sstream>

#include "cfs/errors.hpp"

namespace cfs::cli {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "system file: " + what);
}

WeightConvention parse_convention(const std::string& name) {
  if (name == "counting") return WeightConvention::Counting;
  if (name == "eps4") return WeightConvention::Eps4;
  if (name == "custom") return WeightConvention::Custom;
  schema_error("unknown weight convention '" + name + "'");
}

json labels_to_json(const std::vector<ModeLabel>& labels) {
  json out = json::array();
  for (const auto& l : labels) out.push_back(format_mode_label(l));
  return out;
}

std::vector<ModeLabel> labels_from_json(const json& arr) {
  std::vector<ModeLabel> out;
  for (const auto& item : arr) out.push_back(parse_mode_label(item.get<std::string>()));
  return out;
}

json operator_to_json(const OperatorPoint& x) {
  json eigenvalues = json::array();
  for (Eigen::Index a = 0; a < x.rank(); ++a) eigenvalues.push_back(x.spectrum()(a));
  json factors = json::array();
  for (Eigen::Index a = 0; a < x.rank(); ++a) {
    json column = json::array();
    for (Eigen::Index i = 0; i < x.hilbert_dim(); ++i) {
      const complex z = x.factors()(i, a);
      column.push_back(json::array({z.real(), z.imag()}));
    }
    factors.push_back(std::move(column));
  }
  return json{{"eigenvalues", std::move(eigenvalues)}, {"factors", std::move(factors)}};
}

OperatorPoint operator_from_json(const json& op, Eigen::Index f, int n) {
  const auto& eigenvalues = op.at("eigenvalues");
  const auto& factors = op.at("factors");
  if (!eigenvalues.is_array() || !factors.is_array() || eigenvalues.size() != factors.size()) {
    schema_error("operator needs equally long 'eigenvalues' and 'factors' arrays");
  }
  const auto r = static_cast<Eigen::Index>(eigenvalues.size());
  if (r == 0) return OperatorPoint::zero(f, n);
  CMatrix e(f, r);
  RVector nu(r);
  for (Eigen::Index a = 0; a < r; ++a) {
    nu(a) = eigenvalues[a].get<double>();
    const auto& column = factors[a];
    if (!column.is_array() || static_cast<Eigen::Index>(column.size()) != f) {
      schema_error("factor length does not match hilbert_dim");
    }
    for (Eigen::Index i = 0; i < f; ++i) {
      const auto& z = column[i];
      if (!z.is_array() || z.size() != 2) schema_error("complex entries must be [re, im] pairs");
      e(i, a) = complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return OperatorPoint(std::move(e), std::move(nu), n);
}

}  // namespace

SystemFile system_from_lattice(const LatticeSeaSystem& sys, const OccupationEdits& edits) {
  SystemFile file;
  file.spin_dim = sys.measure().spin_dim();
  file.hilbert_dim = sys.hilbert_dim();
  file.lattice = LatticeProvenance{sys.spec(), edits};
  file.convention = sys.weight_convention();
  file.counting_weight = sys.counting_weight();
  file.measure = sys.measure();
  return file;
}

SystemFile system_from_measure(DiscreteMeasure measure) {
  SystemFile file;
  if (measure.empty()) schema_error("measure has no atoms");
  file.spin_dim = measure.spin_dim();
  file.hilbert_dim = measure.hilbert_dim();
  file.convention = WeightConvention::Custom;
  file.counting_weight = 0.0;
  file.measure = std::move(measure);
  return file;
}

json to_json(const SystemFile& file) {
  json builder;
  if (file.lattice) {
    const auto& spec = file.lattice->spec;
    builder = json{{"kind", "lattice"},
                   {"eps", spec.eps},
                   {"n_t", spec.n_t},
                   {"n_s", spec.n_s},
                   {"mass", spec.mass},
                   {"added_modes", labels_to_json(file.lattice->edits.added)},
                   {"removed_modes", labels_to_json(file.lattice->edits.removed)}};
  } else {
    builder = json{{"kind", "abstract"}};
    if (file.family) {
      builder["family"] = file.family->name;
      builder["parameters"] = file.family->parameters;
    }
  }

  json atoms = json::array();
  for (const auto& atom : file.measure) {
    atoms.push_back(json{{"weight", atom.weight}, {"operator", operator_to_json(atom.point)}});
  }

  return json{{"metadata",
               {{"schema_version", kSchemaVersion},
                {"spin_dimension", file.spin_dim},
                {"hilbert_dim", file.hilbert_dim},
                {"builder", std::move(builder)},
                {"counting_weight", {{"convention", to_string(file.convention)}, {"value", file.counting_weight}}}}},
              {"atoms", std::move(atoms)}};
}

SystemFile system_from_json(const json& doc) {
  try {
    const auto& meta = doc.at("metadata");
    if (meta.at("schema_version").get<int>() != kSchemaVersion) schema_error("unsupported schema_version");
    SystemFile file;
    file.spin_dim = meta.at("spin_dimension").get<int>();
    file.hilbert_dim = meta.at("hilbert_dim").get<Eigen::Index>();
    if (file.spin_dim < 1 || file.hilbert_dim < 1) schema_error("dimensions must be positive");

    const auto& builder = meta.at("builder");
    const auto kind = builder.at("kind").get<std::string>();
    if (kind == "lattice") {
      LatticeProvenance lp;
      lp.spec.eps = builder.at("eps").get<double>();
      lp.spec.n_t = builder.at("n_t").get<int>();
      lp.spec.n_s = builder.at("n_s").get<int>();
      lp.spec.mass = builder.at("mass").get<double>();
      lp.edits.added = labels_from_json(builder.at("added_modes"));
      lp.edits.removed = labels_from_json(builder.at("removed_modes"));
      file.lattice = std::move(lp);
    } else if (kind == "abstract") {
      if (builder.contains("family")) {
        file.family = FamilyProvenance{builder.at("family").get<std::string>(),
                                       builder.at("parameters").get<std::vector<double>>()};
      }
    } else {
      schema_error("unknown builder kind '" + kind + "'");
    }

    const auto& cw = meta.at("counting_weight");
    file.convention = parse_convention(cw.at("convention").get<std::string>());
    file.counting_weight = cw.at("value").get<double>();

    std::vector<Atom> atoms;
    for (const auto& item : doc.at("atoms")) {
      atoms.push_back({operator_from_json(item.at("operator"), file.hilbert_dim, file.spin_dim),
                       item.at("weight").get<double>()});
    }
    if (atoms.empty()) schema_error("no atoms");
    file.measure = DiscreteMeasure(std::move(atoms));
    return file;
  } catch (const json::exception& e) {
    schema_error(e.what());
  }
}

std::string dump_system(const SystemFile& file) { return to_json(file).dump(2) + "\n"; }

void save_system(const SystemFile& file, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "' for writing");
  out << dump_system(file);
  if (!out) throw Error(ErrorCode::InvalidArgument, "failed writing '" + path.string() + "'");
}

SystemFile load_system(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    schema_error(path.string() + ": " + e.what());
  }
  return system_from_json(doc);
}

}  // namespace cfs::cli
