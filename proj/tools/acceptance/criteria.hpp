#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rivet::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Collects named sub-checks; the outcome passes when all of them do.
class Checklist {
 public:
  void add(const std::string& what, bool ok) {
    if (!ok) failed_.push_back(what);
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += "; ";
    notes_ += s;
  }
  Outcome outcome() const;

 private:
  std::vector<std::string> failed_;
  std::string notes_;
};

Outcome criterion_toy_trajectory();
Outcome criterion_toy_schemes();
Outcome criterion_bv_condition();
Outcome criterion_snap();
Outcome criterion_fem_oracles();
Outcome criterion_ct_run();
Outcome criterion_norm_robustness();

}  // namespace rivet::acceptance
