#pragma once

#include <set>
#include <vector>

#include "ctm/integrator.hpp"
#include "ctm/network.hpp"

namespace ctm {

using AgentSet = std::set<int>;

/// Synchronous best response of the deterministic linear threshold model.
/// Agent i is active afterwards iff its active-neighbour fraction is
/// strictly greater than mu_i, or it is a seed. Equality does not activate.
/// Throws ConfigurationError for an isolated agent.
AgentSet ltm_step(const Network& network, const AgentSet& active, const AgentSet& seeds = {});

struct LtmResult {
    AgentSet active;
    std::vector<int> activation_round;  // 0 for seeds, -1 for never active
    bool converged = false;
    int rounds = 0;
};

/// Iterates ltm_step from `seeds` with seeds pinned, until the set repeats
/// or 4N rounds elapse.
LtmResult ltm_fixed_point(const Network& network, const AgentSet& seeds);

struct AgreementReport {
    AgentSet ctm_active;
    AgentSet ltm_active;
    bool match = false;
    bool switch_order_match = false;
    bool ltm_converged = false;
    bool ctm_steady = false;
    // Some agent's active fraction equals its threshold at the LTM fixed
    // point; the CTM steady state is then marginal and the sign is not
    // meaningful.
    bool marginal = false;
    std::vector<double> ctm_switch_times;  // first upward zero crossing; -1 if none
    std::vector<int> ltm_rounds;

    bool conclusive() const { return ltm_converged && ctm_steady && !marginal; }
};

/// Runs the CTM with Fixed u=1 and gain v, seeds started at +3 and held
/// there, all other agents started at -1, and compares the steady-state
/// sign pattern and the switching order against ltm_fixed_point.
AgreementReport ctm_ltm_agreement(const Network& network, const AgentSet& seeds, double v,
                                  const IntegratorConfig& integ);

/// Integrator settings suited to large v (adaptive, t_end=60).
IntegratorConfig default_agreement_integrator();

}  // namespace ctm
