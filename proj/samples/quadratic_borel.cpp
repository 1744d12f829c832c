// Borel transforms of the normalising series of a field with several
// letters, and a partial sum of phi_hat_0 inside its disc of convergence.

#include <iostream>

#include <mouldcalc.hpp>

int main()
{
    using namespace mouldcalc;
    const auto field = extract_letters(bivariate_from_terms({{1, 0, Scalar(1)},
                                                             {2, 0, Scalar::fraction(-1, 3)},
                                                             {0, 1, Scalar(1)},
                                                             {2, 1, Scalar::fraction(1, 2)},
                                                             {1, 2, Scalar(1)},
                                                             {2, 2, Scalar(2)},
                                                             {1, 3, Scalar::fraction(-1, 2)}},
                                                            2, 3));
    const int zeta_order = 8;
    for (int n = 0; n <= 2; ++n) {
        std::cout << "phi_hat_" << n << " = " << borel_phi_n(field, n, zeta_order).to_string() << '\n';
    }
    const auto s = evaluate_partial_sum(borel_phi_n(field, 0, zeta_order), Scalar::fraction(1, 4));
    std::cout << "phi_hat_0(1/4) ~ " << s.value.to_string() << " = " << s.value.re().get_d();
    if (s.tail_bound) {
        std::cout << " (tail bound " << *s.tail_bound << ')';
    }
    std::cout << '\n';
}
