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

#ifndef QMETRO_FRAME_H
#define QMETRO_FRAME_H

#include <string_view>

#include "qmetro/pauli.h"

namespace qmetro {

/// A Clifford change of basis U. Every Pauli word maps to a signed Pauli word
/// under U P U^dag, so a Lindblad problem written in Pauli strings stays one.
/// Expectation values are frame independent.
///
///   kComputational    U = I
///   kHadamard         U = H^N
///   kCzChain          U = prod_j CZ(j, j+1)
///   kHadamardCzChain  U = H^N prod_j CZ(j, j+1)
enum class CliffordFrame { kComputational, kHadamard, kCzChain, kHadamardCzChain };

inline constexpr CliffordFrame kAllFrames[] = {CliffordFrame::kComputational, CliffordFrame::kHadamard,
                                               CliffordFrame::kCzChain, CliffordFrame::kHadamardCzChain};

std::string_view to_string(CliffordFrame f);

/// U p U^dag.
PauliString conjugate(const PauliString &p, CliffordFrame f);
PauliSum conjugate(const PauliSum &op, CliffordFrame f);
/// U |psi>.
Eigen::VectorXcd to_frame(const Eigen::VectorXcd &psi, CliffordFrame f);
/// U^dag m U, mapping a frame operator back to the computational basis.
Eigen::MatrixXcd to_lab(const Eigen::MatrixXcd &m, CliffordFrame f);

}  // namespace qmetro

#endif
