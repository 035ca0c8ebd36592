// Copyright 2026 qsegsim Contributors
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

#pragma once

#include <stdexcept>

#include "qsegsim/pauli.hpp"
#include "qsegsim/rng.hpp"

namespace qsegsim {

// Depolarizing error rates for every operation class. The chain ties them
// together: init and measurement flips equal the two-qubit gate rate,
// single-qubit gates run at a tenth of it, and the memory rate is set so
// that one full round of stabiliser measurements costs one two-qubit gate:
// 5(2d-1) * eps0 = eps2.
struct NoiseParams {
    double eps2 = 0.0;  // per two-qubit gate
    double eps1 = 0.0;  // per single-qubit gate (basis Hadamards)
    double epsI = 0.0;  // init flip
    double epsM = 0.0;  // measurement flip
    double eps0 = 0.0;  // memory error per step of two-qubit-gate duration
    int d = 0;          // code distance used to derive eps0

    static NoiseParams zero() {
        return NoiseParams{};
    }
};

inline NoiseParams derive_rates(double eps2, int d) {
    if (eps2 < 0.0 || eps2 > 1.0) {
        throw std::invalid_argument("eps2 must be in [0,1]");
    }
    if (d < 3) {
        throw std::invalid_argument("d must be >= 3");
    }
    NoiseParams p;
    p.eps2 = eps2;
    p.eps1 = eps2 / 10.0;
    p.epsI = eps2;
    p.epsM = eps2;
    p.eps0 = eps2 / (5.0 * (2.0 * d - 1.0));
    p.d = d;
    return p;
}

// Single-qubit depolarizing channel: I with probability 1-rate, each of
// X, Y, Z with rate/3.
inline PauliOperator sample_one_qubit_channel(double rate, std::mt19937_64 &rng) {
    PauliOperator p(1);
    if (uniform01(rng) < rate) {
        switch (rng() % 3) {
            case 0:
                p.set_x(0);
                break;
            case 1:
                p.set_y(0);
                break;
            default:
                p.set_z(0);
        }
    }
    return p;
}

// Two-qubit depolarizing channel: identity with probability 1-rate, each of
// the 15 non-identity two-qubit Paulis with rate/15.
inline PauliOperator sample_two_qubit_channel(double rate, std::mt19937_64 &rng) {
    PauliOperator p(2);
    if (uniform01(rng) < rate) {
        uint64_t v = rng() % 15 + 1;  // (a,b) != (I,I)
        uint64_t a = v / 4, b = v % 4;
        if (a == 1 || a == 2) {
            p.x.set(0, true);
        }
        if (a == 2 || a == 3) {
            p.z.set(0, true);
        }
        if (b == 1 || b == 2) {
            p.x.set(1, true);
        }
        if (b == 2 || b == 3) {
            p.z.set(1, true);
        }
    }
    return p;
}

}  // namespace qsegsim
