// Minimizes a random least-squares problem with the constant-step and the
// backtracking methods, using nothing but function values.
#include <cstdio>

#include "dfo/dfo.hpp"

int main() {
  const auto inst = dfo::random_instance(dfo::Family::least_squares, 10, 20, 42);

  dfo::DfcConfig dfc;
  dfc.x1 = dfo::Vector::Zero(inst.dim);
  dfc.budget = 2000;
  const auto a = dfo::dfc_run(inst.objective, dfo::Scheme::forward, dfc);

  dfo::DfbConfig dfb;
  dfb.x1 = dfc.x1;
  dfb.budget = 2000;
  const auto b = dfo::dfb_run(inst.objective, dfo::Scheme::central, dfb, 1e-8, 1);

  for (const auto* rep : {&a, &b})
    std::printf("%-11s f(x1) = %-10.4g best f = %-12.6g evaluations = %ld, final C = %g\n", rep->solver.c_str(),
                rep->f_initial, rep->f_best, rep->evaluations, rep->C_final);
  dfo::emit_csv(a.trace, "quickstart_dfc.csv");
  std::printf("trace written to quickstart_dfc.csv\n");
}
