#include <cmath>
#include <cstdio>
#include <sstream>

#include "trates/eval/evaluation.hpp"

namespace trates::eval {

namespace {

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(sep);
    out += v[i];
  }
  return out;
}

std::string manifest_comment(const RunManifest& m) { return "# manifest\t" + m.to_json().dump() + "\n"; }

}  // namespace

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["dataset"] = dataset_name;
  j["dataset_digest"] = dataset_digest;
  j["config_digest"] = config_digest;
  j["config"] = config;
  for (const auto& [k, v] : extra) j[k] = v;
  return j;
}

std::string fold_table(std::span<const CvReport> reports, const RunManifest& manifest) {
  std::ostringstream out;
  out << manifest_comment(manifest);
  out << "run\tfold_id\ttrait\ttarget_prompts\tn_train\tn_val\tn_target\tn_features\tqwk\tepochs"
         "\tloss\tlearning_rate\thidden_layers\tneurons\tactivation\tl2\tdropout\n";
  for (const auto& rep : reports) {
    for (const auto& f : rep.folds) {
      out << rep.label << '\t' << f.fold_id << '\t' << f.trait << '\t' << join(f.target_prompts, ',')
          << '\t' << f.n_train << '\t' << f.n_val << '\t' << f.n_target << '\t' << f.n_features
          << '\t' << fixed(f.qwk, 6) << '\t' << f.epochs_run;
      if (f.epochs_run > 0) {
        out << '\t' << model::to_string(f.hp.loss) << '\t' << f.hp.learning_rate << '\t'
            << f.hp.hidden_layers << '\t' << f.hp.neurons << '\t'
            << model::to_string(f.hp.activation) << '\t' << f.hp.l2 << '\t' << f.hp.dropout;
      } else {
        out << "\t-\t-\t-\t-\t-\t-\t-";
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string summary_markdown(std::span<const CvReport> reports,
                             const std::vector<std::string>& traits, const RunManifest& manifest) {
  std::ostringstream out;
  out << "# Cross-prompt QWK\n\n| Model |";
  for (const auto& t : traits) out << ' ' << t << " |";
  out << " AVG |\n|---|";
  for (std::size_t i = 0; i <= traits.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& rep : reports) {
    out << "| " << rep.label << " |";
    double sum = 0;
    int n = 0;
    for (const auto& t : traits) {
      auto it = rep.trait_average.find(t);
      if (it == rep.trait_average.end()) {
        out << " - |";
        continue;
      }
      out << ' ' << fixed(it->second, 3) << " |";
      sum += it->second;
      ++n;
    }
    out << ' ' << (n ? fixed(sum / n, 3) : std::string("-")) << " |\n";
  }
  out << "\nValues are unweighted means over the folds whose target prompt carries the trait.\n";
  out << "\n## Run manifest\n\n```json\n" << manifest.to_json().dump(2) << "\n```\n";
  return out.str();
}

std::string ablation_table(std::span<const AblationRow> rows, const std::vector<std::string>& traits,
                           const RunManifest& manifest) {
  std::ostringstream out;
  out << manifest_comment(manifest);
  out << "category";
  for (const auto& t : traits) out << '\t' << t;
  out << "\tAVG\n";
  for (const auto& r : rows) {
    out << to_string(r.category);
    for (const auto& t : traits) {
      auto it = r.drop.find(t);
      out << '\t' << (it == r.drop.end() ? std::string("-") : fixed(it->second, 6));
    }
    out << '\t' << fixed(r.average_drop, 6) << '\n';
  }
  return out.str();
}

}  // namespace trates::eval
