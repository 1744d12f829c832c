// Normalising series of the Euler field x^2 d/dx + (x + y) d/dy.
// phi_0 is the divergent Euler series -sum (k-1)! x^k; the other components
// vanish.

#include <iostream>

#include <mouldcalc.hpp>

int main()
{
    using namespace mouldcalc;
    const auto field = extract_letters(bivariate_from_terms({{1, 0, Scalar(1)}, {0, 1, Scalar(1)}}, 1, 1));
    const int order = 12;
    for (int n = 0; n <= 2; ++n) {
        std::cout << "phi_" << n << " = " << phi_n(field, n, order).to_string() << '\n';
    }
    std::cout << "psi_0 = " << psi_n(field, 0, order).to_string() << '\n';
    const auto residual = pde_residual(field.polynomial(), phi_series(field, 2, order));
    std::cout << "conjugacy residual is " << (residual.is_zero() ? "zero" : "NONZERO") << '\n';
    return residual.is_zero() ? 0 : 1;
}
