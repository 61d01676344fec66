#include <fmt/format.h>

#include <CLI11.hpp>
#include <set>

#include "criteria.hpp"

using namespace rivet::acceptance;

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run (default all)")->check(CLI::Range(1, 7));
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected(only.begin(), only.end());

  const std::vector<std::pair<const char*, Outcome (*)()>> all = {
      {"toy trajectory", criterion_toy_trajectory},
      {"toy scheme discrimination", criterion_toy_schemes},
      {"BV necessary condition", criterion_bv_condition},
      {"snap-through", criterion_snap},
      {"FEM unit oracles", criterion_fem_oracles},
      {"coarse CT run", criterion_ct_run},
      {"norm-choice robustness", criterion_norm_robustness},
  };
  int failures = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = all[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    fmt::print("criterion {} ({}): {} | {}\n", id, all[i].first, o.pass ? "PASS" : "FAIL", o.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
