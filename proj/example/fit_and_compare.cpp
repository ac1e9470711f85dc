// Draw a correlated sample, fit it with every estimator and report the
// message length and KL distance to the generating model.

#include <cstdio>

#include "bvm.hpp"

int main() {
  using namespace bvm;
  const auto truth = BvmSineParams::from_rho(kPi / 2, kPi / 2, 1.0, 10.0, 0.9);
  const auto data = sample(truth, 200, 42);
  const auto stats = TorusStats::from(data);

  std::printf("%-5s %8s %8s %8s %8s %8s %10s\n", "", "mu1", "mu2", "kappa1", "kappa2", "lambda", "KL");
  for (Method m : {Method::ML, Method::MAP1, Method::MAP2, Method::MAP3, Method::MML}) {
    const auto rep = estimate(stats, m);
    const auto& p = rep.params_hat;
    std::printf("%-5s %8.4f %8.4f %8.4f %8.4f %8.4f %10.6f\n", to_string(m), p.mu1(), p.mu2(), p.kappa1(),
                p.kappa2(), p.lambda(), kl_sine(truth, p));
  }

  const auto mml = estimate(stats, Method::MML).params_hat;
  const auto msg = message_length(data, mml, Variant::Sine);
  std::printf("\nmessage length at the MML estimate: %.2f + %.2f = %.2f bits\n", msg.first_part, msg.second_part,
              msg.total);
  return 0;
}
