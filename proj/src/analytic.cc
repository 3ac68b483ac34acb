// Copyright 2026 The qmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qmetro/analytic.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "qmetro/dynamics.h"
#include "qmetro/errors.h"

namespace qmetro {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Published generator, one token per entry: g = gamma, c = chi, ic = i chi.
constexpr const char *kPrintedRows[15] = {
    "-g 0 0 0 0 -c 0 0 0 0 0 0 0 0 0",   "0 -g 0 0 c 0 0 0 0 0 0 0 0 0 -c",   "0 0 0 0 0 0 0 0 0 0 0 0 0 c 0",
    "0 0 0 -g 0 0 0 0 -c 0 0 0 0 0 0",   "0 -c 0 0 -2g 0 0 -c 0 0 0 0 0 0 0", "c 0 0 0 0 -2g 0 0 0 0 ic 0 0 0 0",
    "0 0 0 0 0 0 -g 0 0 -ic 0 0 0 0 0",  "0 0 0 0 c 0 0 -g 0 0 0 0 0 0 -c",   "0 0 0 c 0 0 0 0 -2g 0 0 0 0 ic 0",
    "0 0 0 0 0 0 -ic 0 0 -2g 0 0 -ic 0 0", "0 0 0 0 0 ic 0 0 0 0 -g -c 0 0 0", "0 0 0 0 0 0 0 0 0 0 c 0 0 0 0",
    "0 0 0 0 0 0 0 0 0 -ic 0 0 -g 0 0",  "0 0 -c 0 0 0 0 0 ic 0 0 0 0 -g 0",  "0 c 0 0 0 0 0 c 0 0 0 0 0 0 0",
};

void parse_token(const std::string &tok, int &chi_re, int &chi_im, int &gamma) {
    chi_re = chi_im = gamma = 0;
    if (tok == "0") {
        return;
    }
    std::string body = tok;
    int sign = 1;
    if (body.front() == '-') {
        sign = -1;
        body.erase(0, 1);
    }
    int mult = 1;
    if (!body.empty() && std::isdigit(static_cast<unsigned char>(body.front()))) {
        mult = body.front() - '0';
        body.erase(0, 1);
    }
    if (body == "g") {
        gamma = sign * mult;
    } else if (body == "c") {
        chi_re = sign * mult;
    } else if (body == "ic") {
        chi_im = sign * mult;
    } else {
        throw std::logic_error("bad generator token " + tok);
    }
}

// Dense sigma_i (x) sigma_j with i on the first (most significant) qubit.
Eigen::MatrixXcd basis_matrix(int i, int j) {
    static constexpr Pauli kLetters[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
    PauliString p = PauliString::identity(2);
    p.set_letter(0, kLetters[i]);
    p.set_letter(1, kLetters[j]);
    return apply_left(p, Eigen::MatrixXcd::Identity(4, 4));
}

// Projects L(sigma_kl) onto sigma_ij for the N=2 cluster setup.
GeneratorMatrix project_generator(double chi, double gamma) {
    ObservableOperator h0 = build_hamiltonian(Scheme::kCluster, 2, 1.0);
    NoiseChannel channel{ChannelKind::kDephasing, gamma};
    Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(4, 4);
    GeneratorMatrix a = GeneratorMatrix::Zero();
    for (int col = 0; col < 15; col++) {
        int k = (col + 1) / 4, l = (col + 1) % 4;
        Eigen::MatrixXcd out = lindblad_rhs(basis_matrix(k, l), zero, h0, chi, channel).drho_dt;
        for (int row = 0; row < 15; row++) {
            int i = (row + 1) / 4, j = (row + 1) % 4;
            // Pauli words are orthogonal with tr(P Q) = 4 delta_PQ.
            a(row, col) = (basis_matrix(i, j).adjoint() * out).trace() / 4.0;
        }
    }
    return a;
}

int exact_integer(double v) {
    double r = std::round(v);
    if (std::abs(v - r) > 1e-12) {
        throw std::logic_error("generator projection is not an integer multiple");
    }
    return static_cast<int>(r);
}

std::string format_entry(int chi_re, int chi_im, int gamma) {
    std::ostringstream os;
    auto term = [&](int w, const char *sym) {
        if (w == 0) {
            return;
        }
        if (os.tellp() > 0) {
            os << (w > 0 ? " + " : " - ");
        } else if (w < 0) {
            os << "-";
        }
        if (std::abs(w) != 1) {
            os << std::abs(w);
        }
        os << sym;
    };
    term(chi_re, "chi");
    term(chi_im, "i chi");
    term(gamma, "gamma");
    return os.tellp() > 0 ? os.str() : "0";
}

double effective_rate(EnvelopeFamily family, double gamma, ChannelKind channel) {
    if (family != EnvelopeFamily::kClusterApprox && channel == ChannelKind::kDamping) {
        return gamma / 2;
    }
    return gamma;
}

}  // namespace

int coefficient_index(int i, int j) {
    if (i < 0 || i > 3 || j < 0 || j > 3 || (i == 0 && j == 0)) {
        throw std::out_of_range("coefficient index outside the 15 traceless components");
    }
    return 4 * i + j - 1;
}

GeneratorMatrix SymbolicGenerator::evaluate(double chi, double g) const {
    GeneratorMatrix a;
    for (int r = 0; r < 15; r++) {
        for (int c = 0; c < 15; c++) {
            a(r, c) = Complex(chi * chi_re(r, c) + g * gamma(r, c), chi * chi_im(r, c));
        }
    }
    return a;
}

SymbolicGenerator printed_generator() {
    SymbolicGenerator s;
    for (int r = 0; r < 15; r++) {
        std::istringstream row(kPrintedRows[r]);
        for (int c = 0; c < 15; c++) {
            std::string tok;
            row >> tok;
            parse_token(tok, s.chi_re(r, c), s.chi_im(r, c), s.gamma(r, c));
        }
    }
    return s;
}

SymbolicGenerator derived_generator() {
    // The generator is affine in (chi, gamma) with no constant part, so two
    // evaluations separate the weights.
    GeneratorMatrix a_chi = project_generator(1.0, 0.0);
    GeneratorMatrix a_gamma = project_generator(1.0, 1.0) - a_chi;
    SymbolicGenerator s;
    for (int r = 0; r < 15; r++) {
        for (int c = 0; c < 15; c++) {
            s.chi_re(r, c) = exact_integer(a_chi(r, c).real());
            s.chi_im(r, c) = exact_integer(a_chi(r, c).imag());
            s.gamma(r, c) = exact_integer(a_gamma(r, c).real());
            if (exact_integer(a_gamma(r, c).imag()) != 0) {
                throw std::logic_error("dephasing generator has an imaginary gamma part");
            }
        }
    }
    return s;
}

GeneratorMatrix build_matrix_a(double chi, double gamma) {
    static const SymbolicGenerator printed = printed_generator();
    return printed.evaluate(chi, gamma);
}

GeneratorMatrix derive_matrix_a(double chi, double gamma) {
    static const SymbolicGenerator derived = derived_generator();
    return derived.evaluate(chi, gamma);
}

std::vector<GeneratorMismatch> compare_generators(const SymbolicGenerator &printed, const SymbolicGenerator &derived) {
    std::vector<GeneratorMismatch> out;
    for (int r = 0; r < 15; r++) {
        for (int c = 0; c < 15; c++) {
            if (printed.chi_re(r, c) != derived.chi_re(r, c) || printed.chi_im(r, c) != derived.chi_im(r, c) ||
                printed.gamma(r, c) != derived.gamma(r, c)) {
                out.push_back({r + 1, c + 1, format_entry(printed.chi_re(r, c), printed.chi_im(r, c), printed.gamma(r, c)),
                               format_entry(derived.chi_re(r, c), derived.chi_im(r, c), derived.gamma(r, c))});
            }
        }
    }
    return out;
}

CoefficientVector initial_coefficients() {
    CoefficientVector c = CoefficientVector::Zero();
    c(coefficient_index(1, 1)) = -0.25;
    c(coefficient_index(2, 2)) = 0.25;
    c(coefficient_index(3, 3)) = 0.25;
    return c;
}

ExpmEvolution evolve_expm(double chi, double gamma, double t) {
    if (!(t >= 0)) {
        throw std::invalid_argument("evolve_expm: t must be non-negative");
    }
    Eigen::MatrixXcd at = derive_matrix_a(chi, gamma) * t;
    Eigen::MatrixXcd prop = at.exp();
    ExpmEvolution out;
    out.c = prop * initial_coefficients();
    out.expM = 4.0 * out.c(coefficient_index(3, 3)).real();
    return out;
}

double omega(double chi, double gamma) {
    if (!(gamma >= 0) || !(gamma < 2 * chi)) {
        throw OmegaDomainError("closed forms need 0 <= gamma < 2 chi");
    }
    return std::sqrt(4 * chi * chi - gamma * gamma);
}

double closed_form_expectation_n2(double chi, double gamma, double t) {
    double w = omega(chi, gamma);
    return std::exp(-gamma * t) * (std::cos(w * t) + gamma / w * std::sin(w * t));
}

double closed_form_deviation(size_t n, double chi, double gamma, double t, double T) {
    if (n != 1 && n != 2) {
        throw std::invalid_argument("closed_form_deviation covers n = 1 and n = 2 only");
    }
    double w = omega(chi, gamma);
    double a = gamma / w;
    if (n == 2) {
        double s = std::cos(w * t) + a * std::sin(w * t);
        double num = std::exp(gamma * t) * std::sqrt(std::max(0.0, 1 - std::exp(-2 * gamma * t) * s * s));
        double den = std::sqrt(T * t) * 4 * chi / w *
                     std::abs(a * std::cos(w * t) - (1 + gamma / (w * w * t)) * std::sin(w * t));
        return den > 0 ? num / den : kNaN;
    }
    double ph = w * t / 2;
    double s = std::cos(ph) + a * std::sin(ph);
    double num = std::exp(gamma * t / 2) * std::sqrt(std::max(0.0, 1 - std::exp(-gamma * t) * s * s));
    double den = std::sqrt(T * t) * 2 * chi / w * std::abs(a * std::cos(ph) - (1 + 2 * gamma / (w * w * t)) * std::sin(ph));
    return den > 0 ? num / den : kNaN;
}

double extrapolated_cluster_expectation(size_t n, double chi, double gamma, double t) {
    double w = omega(chi, gamma);
    double half_n = static_cast<double>(n) / 2;
    return std::exp(-half_n * gamma * t) * (std::cos(half_n * w * t) + gamma / w * std::sin(half_n * w * t));
}

std::string_view to_string(EnvelopeFamily f) {
    switch (f) {
        case EnvelopeFamily::kRefMax:
            return "ref-max";
        case EnvelopeFamily::kRefUnc:
            return "ref-unc";
        case EnvelopeFamily::kClusterApprox:
            return "cluster-approx";
    }
    return "?";
}

EnvelopeFamily envelope_family(Scheme s) {
    switch (s) {
        case Scheme::kCluster:
            return EnvelopeFamily::kClusterApprox;
        case Scheme::kRef1Max:
        case Scheme::kRef2Max:
            return EnvelopeFamily::kRefMax;
        case Scheme::kRef1Unc:
        case Scheme::kRef2Unc:
            return EnvelopeFamily::kRefUnc;
    }
    throw std::invalid_argument("unknown scheme");
}

double envelope(EnvelopeFamily family, size_t n, double chi, double gamma, double t, double T, bool exact,
                ChannelKind channel) {
    double nn = static_cast<double>(n);
    double g = effective_rate(family, gamma, channel);
    switch (family) {
        case EnvelopeFamily::kRefMax:
            return std::exp(nn * g * t) / (nn * std::sqrt(T * t));
        case EnvelopeFamily::kRefUnc:
            return std::exp(g * t) / std::sqrt(nn * T * t);
        case EnvelopeFamily::kClusterApprox:
            if (exact && n == 2) {
                double w = omega(chi, g);
                return std::exp(g * t) * w * w * std::sqrt(t) / (2 * std::sqrt(T) * (g + 4 * chi * chi * t));
            }
            return std::exp(nn * g * t / 2) / (nn * std::sqrt(T * t));
    }
    throw std::invalid_argument("unknown envelope family");
}

EnvelopeMinimum minima_and_times(EnvelopeFamily family, size_t n, double chi, double gamma, double T,
                                 ChannelKind channel) {
    if (!(gamma > 0)) {
        return {std::numeric_limits<double>::infinity(), 0.0, false};
    }
    double nn = static_cast<double>(n);
    double g = effective_rate(family, gamma, channel);
    double t = 0;
    bool exact = false;
    switch (family) {
        case EnvelopeFamily::kRefMax:
            t = 1 / (2 * nn * g);
            break;
        case EnvelopeFamily::kRefUnc:
            t = 1 / (2 * g);
            break;
        case EnvelopeFamily::kClusterApprox:
            if (n == 2) {
                double r = g / chi;
                t = (1 + std::sqrt(1 - 3 * r * r + r * r * r * r / 4)) / (4 * g) - g / (8 * chi * chi);
                exact = true;
            } else {
                t = 1 / (nn * g);
            }
            break;
    }
    return {t, envelope(family, n, chi, gamma, t, T, exact, channel), true};
}

double epsilon_series(double x) {
    return 1 - 1 / std::numbers::sqrt2 + 3 / (4 * std::numbers::sqrt2) * x * x;
}

std::vector<double> hump_positions(double chi, int k_max) {
    std::vector<double> out;
    for (int k = 1; k <= k_max; k += 2) {
        double kp = k * std::numbers::pi;
        out.push_back(2 * chi / std::sqrt(kp * kp + 1));
    }
    return out;
}

ScalingTerms scaling_expansion(EnvelopeFamily family, size_t n, double gamma, double t, double T) {
    double nn = static_cast<double>(n);
    ScalingTerms s{};
    switch (family) {
        case EnvelopeFamily::kClusterApprox:
            s.heisenberg_term = 1 / (nn * std::sqrt(T * t));
            s.offset_term = gamma / 2 * std::sqrt(t / T);
            s.validity_parameter = nn * gamma * t / 2;
            break;
        case EnvelopeFamily::kRefMax:
            s.heisenberg_term = 1 / (nn * std::sqrt(T * t));
            s.offset_term = gamma * std::sqrt(t / T);
            s.validity_parameter = nn * gamma * t;
            break;
        case EnvelopeFamily::kRefUnc:
            s.heisenberg_term = 1 / std::sqrt(nn * T * t);
            s.offset_term = gamma * std::sqrt(t) / std::sqrt(nn * T);
            s.validity_parameter = gamma * t;
            break;
    }
    s.valid = s.validity_parameter < 1;
    return s;
}

}  // namespace qmetro
