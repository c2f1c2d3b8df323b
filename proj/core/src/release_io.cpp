// Copyright 2026 The dpdirichlet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <stdexcept>

#include "dpdir/mechanisms.hpp"
#include "json.hpp"

namespace dpdir {

namespace {

using nlohmann::json;

json budget_to_json(const PrivacyBudget& budget) {
  json ledger = json::array();
  for (const BudgetEntry& e : budget.entries()) {
    ledger.push_back({{"mechanism", e.mechanism},
                      {"epsilon", e.epsilon},
                      {"composition", e.composition}});
  }
  return json{{"eps1", budget.eps1()},
              {"eps2", budget.eps2()},
              {"total", budget.total()},
              {"ledger", ledger}};
}

PrivacyBudget budget_from_json(const json& j) {
  PrivacyBudget budget(j.at("eps1").get<double>(), j.at("eps2").get<double>());
  for (const json& e : j.at("ledger")) {
    const std::string composition = e.at("composition").get<std::string>();
    if (composition == "sequential") {
      budget.record_sequential(e.at("mechanism").get<std::string>(),
                               e.at("epsilon").get<double>());
    } else if (composition.rfind("parallel:", 0) == 0) {
      budget.record_parallel(e.at("mechanism").get<std::string>(),
                             e.at("epsilon").get<double>(),
                             composition.substr(9));
    } else {
      throw std::runtime_error("release JSON: unknown composition rule '" +
                               composition + "'");
    }
  }
  return budget;
}

}  // namespace

std::string release_to_json(const DPRelease& release) {
  json stats = json::array();
  for (const ReleasedStatistic& s : release.statistics) {
    stats.push_back({{"values", s.stat.values},
                     {"n_basis", s.stat.basis_count},
                     {"scale", s.noise_scale}});
  }
  const json j{{"version", release.version},
               {"d", release.d},
               {"n", release.n},
               {"candidates", release.candidates.values},
               {"noisy_score", release.noisy_score},
               {"selected_a", release.selected_a},
               {"statistics", stats},
               {"budget", budget_to_json(release.budget)},
               {"rng_seed", release.rng_seed}};
  return j.dump(2);
}

DPRelease release_from_json(const std::string& text) {
  const json j = json::parse(text);
  DPRelease out;
  out.version = j.at("version").get<int>();
  if (out.version != 1) {
    throw std::runtime_error("release JSON: unsupported version " +
                             std::to_string(out.version));
  }
  out.d = j.at("d").get<std::size_t>();
  out.n = j.at("n").get<std::size_t>();
  out.candidates =
      ThresholdCandidates(j.at("candidates").get<std::vector<double>>());
  out.noisy_score = j.at("noisy_score").get<std::vector<long long>>();
  out.selected_a = j.at("selected_a").get<double>();
  for (const json& s : j.at("statistics")) {
    ReleasedStatistic rs;
    rs.stat.values = s.at("values").get<std::vector<double>>();
    rs.stat.basis_count = s.at("n_basis").get<std::size_t>();
    rs.stat.threshold = out.selected_a;
    rs.noise_scale = s.at("scale").get<double>();
    out.statistics.push_back(std::move(rs));
  }
  if (out.statistics.empty() || out.statistics.size() > 2) {
    throw std::runtime_error("release JSON: expected one or two statistics");
  }
  out.budget = budget_from_json(j.at("budget"));
  out.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return out;
}

void save_release(const DPRelease& release, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_release: cannot open " + path);
  }
  out << release_to_json(release) << "\n";
}

DPRelease load_release(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_release: cannot open " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return release_from_json(text);
}

}  // namespace dpdir
