#pragma once

// Three-party noisy GHZ operator assembled term by term from its Pauli
// expansion, qubit order (A, B1, B2).

#include <complex>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace oracle {

inline Eigen::Matrix2cd pauli_matrix(char c)
{
    using cd = std::complex<double>;
    Eigen::Matrix2cd m;
    switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cd(0, -1), cd(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
    }
    return m;
}

inline Eigen::MatrixXcd pauli_string(const std::string& s)
{
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (char c : s) {
        Eigen::MatrixXcd next = Eigen::kroneckerProduct(m, pauli_matrix(c)).eval();
        m = next;
    }
    return m;
}

inline Eigen::MatrixXcd noisy_ghz3(double ga, double gb1, double gb2)
{
    const double all = ga * gb1 * gb2;
    Eigen::MatrixXcd rho = pauli_string("III");
    rho += all * pauli_string("XXX");
    rho += gb1 * gb2 * pauli_string("IZZ");
    rho += ga * gb1 * pauli_string("ZZI");
    rho += ga * gb2 * pauli_string("ZIZ");
    rho -= all * pauli_string("YYX");
    rho -= all * pauli_string("XYY");
    rho -= all * pauli_string("YXY");
    return rho / 8.0;
}

} // namespace oracle
