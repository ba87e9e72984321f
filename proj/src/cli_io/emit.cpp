#include "emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bufchem/error.hpp"

namespace bufchem::emit {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

json model_json(const GrowthModel& model) {
  json j;
  j["type"] = std::string(model.name());
  if (const auto* h = model.as_haldane()) {
    j["mu_bar"] = h->mu_bar;
    j["K"] = h->K;
    j["K_I"] = h->K_I;
  } else if (const auto* m = model.as_monod()) {
    j["mu_max"] = m->mu_max;
    j["K_s"] = m->K_s;
  }
  return j;
}

std::string tag_name(const StabilityTag& tag) {
  switch (tag.kind) {
    case StabilityKind::Stable: return "Stable";
    case StabilityKind::Saddle: return "Saddle";
    case StabilityKind::NonHyperbolic: return "NonHyperbolic";
  }
  return "NonHyperbolic";
}

std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format17(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f << content;
  if (!f) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace

void artifact(const OutputOptions& opts, const std::string& name, const std::string& content,
              std::ostream& out) {
  if (!opts.out_dir) {
    out << content;
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(*opts.out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + opts.out_dir->string());
  write_file(*opts.out_dir / name, content);
}

void sidecar(const OutputOptions& opts, const std::string& name, const std::string& content) {
  if (!opts.out_dir) return;
  write_file(*opts.out_dir / name, content);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace bufchem::emit
