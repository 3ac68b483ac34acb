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

#ifndef QMETRO_ERRORS_H
#define QMETRO_ERRORS_H

#include <stdexcept>
#include <string>

namespace qmetro {

/// Operands act on different numbers of qubits or have incompatible shapes.
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A closed form was evaluated outside its real-frequency domain (gamma >= 2 chi).
struct OmegaDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// The adaptive integrator predicted a step below its floor.
struct StiffnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A density matrix or sensitivity drifted past the abort threshold.
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No finite sample was available where one was required.
struct NoFiniteSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    ConfigError(const std::string &msg, int line = 0, std::string field = {})
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line(line),
          field(std::move(field)) {
    }
    int line;
    std::string field;
};

}  // namespace qmetro

#endif
