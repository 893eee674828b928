#include <map>
#include <stdexcept>

#include "wabc/models.hpp"

namespace wabc {

namespace {

const std::map<std::string, GenerativeModel>& registry() {
  static const std::map<std::string, GenerativeModel> models = [] {
    std::map<std::string, GenerativeModel> m;
    for (GenerativeModel model :
         {make_normal_location_model(), make_gandk_model(),
          make_bivariate_gandk_model(), make_toggle_switch_model(),
          make_mg1_model(), make_ar1_model(), make_cosine_model(),
          make_levy_sv_model()})
      m.emplace(model.name, std::move(model));
    return m;
  }();
  return models;
}

}  // namespace

const GenerativeModel& model_registry(const std::string& name) {
  const auto& m = registry();
  auto it = m.find(name);
  if (it == m.end()) throw std::invalid_argument("unknown model: " + name);
  return it->second;
}

std::vector<std::string> model_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

}  // namespace wabc
