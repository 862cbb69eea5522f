// Builds a weighted-isometry map for a qutrit state and prints the entropy table.

#include <iostream>

#include "entropylab/channel.hpp"
#include "entropylab/pair_analysis.hpp"
#include "entropylab/theorems.hpp"

int main() {
  using namespace entropylab;
  const double lambda[] = {0.5, 0.3, 0.2};
  const DensityMatrix rho(ComplexMatrix::diagonal(lambda));
  const BistochasticMatrix a(3, {0.6, 0.3, 0.1, 0.3, 0.5, 0.2, 0.1, 0.2, 0.7});
  const ComplexMatrix id = ComplexMatrix::identity(3);
  const PutMap phi = weighted_isometry_map(a, id, id);

  const PairAnalysis pair = analyze(rho, phi);
  const auto& t = pair.entropies;
  std::cout << "S(rho)          " << t.state << "\n"
            << "S(rho o Phi*)   " << t.output << "\n"
            << "H^lambda(b)     " << t.row_weighted << "\n"
            << "H_mu(b)         " << t.column_weighted << "\n"
            << "S_rho(Phi)      " << t.averaged_out << "\n"
            << "S^rho(Phi*)     " << t.averaged_in << "\n";

  const Tolerances tol = Tolerances::for_dimension(3);
  for (const auto& report : check_all(pair, tol))
    std::cout << to_string(report.theorem) << ": " << to_string(report.consistent) << "\n";
}
