#include <doctest.h>

#include <cmath>

#include "predinfer/harness.hpp"
#include "predinfer/stats.hpp"

using namespace predinfer;

// With a perfect predictor every estimator targets the right parameter; the
// mean point estimate over replicates must sit within Monte Carlo noise of
// the truth, for both the null and the alternative slope.
TEST_CASE("oracle predictor consistency battery") {
  for (double beta1 : {0.0, 1.0}) {
    harness::ExperimentConfig cfg;
    cfg.design = harness::Design::fixed_fhat;
    cfg.beta1_star = beta1;
    cfg.n_grid = {{10000, 100000}};
    cfg.replicates = 50;
    cfg.fhat_ids = {"oracle"};
    cfg.bootstrap_b = 100;
    cfg.master_seed = 4242 + static_cast<std::uint64_t>(beta1);

    const auto records = harness::run_all(cfg);
    const auto summary = harness::summarize(records);
    REQUIRE(summary.size() == 6);
    for (const auto& cell : summary) {
      CAPTURE(cell.method);
      CAPTURE(beta1);
      const double mc_se = cell.sd_beta / std::sqrt(static_cast<double>(cell.replicates));
      CHECK(std::abs(cell.mean_beta - beta1) < 3.0 * mc_se);
    }
  }
}
