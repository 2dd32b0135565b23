// Attack a synthetic image with the closed-form toy classifier.

#include <cstdio>

#include "advlb/search.hpp"

int main() {
  using namespace advlb;

  const ToyClassifier toy = make_toy_classifier(ToySpec::blue_sensitive());
  const ImageBuffer image(32, 32, 0.1f);

  SearchConfig config;
  config.bounds.max.intercept = 31;
  config.bounds.max.width = 10;
  config.t_max = 50;
  config.restarts = 20;
  config.seed = 1;

  const AttackOutcome out = advlb_attack(image, toy, config);
  std::printf("clean label %zu (%.3f) -> %zu (%.3f), %s after %llu queries\n", out.clean_label,
              out.clean_confidence, out.adv_label, out.best_confidence,
              out.success ? "success" : "failure", static_cast<unsigned long long>(out.queries));
  std::printf("beam: lambda=%.1f nm r=%.1f deg b=%.1f px w=%.1f px alpha=%.2f\n",
              out.theta.lambda.nanometers, out.theta.angle_deg, out.theta.intercept, out.theta.width,
              out.theta.intensity);
  return out.success ? 0 : 1;
}
