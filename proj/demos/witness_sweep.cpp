// Minimal library walkthrough: build the two-photon family, evaluate the
// three witnesses, and show why only the covariance-aware ones fire.

#include "entwit/entwit.hpp"

#include <cstdio>
#include <numbers>

using namespace entwit;

int main() {
    const FockSpace space = build_space(8, 8);
    const OperatorSet set = build_operator_set(space);

    std::printf("theta/pi    w9          w12         w14         verdict(w12)\n");
    for (int k = 0; k <= 16; ++k) {
        const double theta = std::numbers::pi * k / 16.0;
        const QuantumState psi =
            realize(StateSpec{.family = Family::two_photon_theta, .theta = theta}, space);
        const CriterionReport rep = evaluate(psi, set);
        std::printf("%-8.4f  %+.3e  %+.3e  %+.3e  %s\n", theta / std::numbers::pi, rep.w9,
                    rep.w12, rep.w14, std::string(to_string(rep.verdict_w12)).c_str());
    }

    // a squeezed state slips past all three: the witnesses are sufficient only
    const FockSpace big = build_space(16, 16);
    const QuantumState tmsv = realize(StateSpec{.family = Family::tmsv, .r = 0.3}, big);
    const CriterionReport rep = evaluate(tmsv, build_operator_set(big));
    std::printf("\ntmsv r=0.3: w9=%+.3e w12=%+.3e (%s)\n", rep.w9, rep.w12,
                std::string(to_string(rep.verdict_w12)).c_str());
    return 0;
}
