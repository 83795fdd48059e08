#include "dropletfem/amr.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dropletfem/errors.hpp"

namespace dropletfem {

MarkSet mark_max(const ErrorField& err, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("mark_max: lambda must lie in [0, 1]");
    MarkSet out;
    out.strategy = MarkingStrategy::max_threshold;
    out.parameter = lambda;
    const double eta_max = err.eta.empty() ? 0.0 : *std::max_element(err.eta.begin(), err.eta.end());
    if (eta_max == 0.0) return out;
    const double threshold = lambda * eta_max;
    for (std::size_t e = 0; e < err.eta.size(); ++e)
        if (err.eta[e] >= threshold) out.marked.push_back(e);
    return out;
}

MarkSet mark_doerfler(const ErrorField& err, double theta, DoerflerAccounting accounting) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("mark_doerfler: theta must lie in (0, 1]");
    MarkSet out;
    out.strategy = MarkingStrategy::doerfler;
    out.parameter = theta;

    const std::size_t n = err.eta.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (err.eta[a] != err.eta[b]) return err.eta[a] > err.eta[b];
        return a < b;  // deterministic ties: lower index first
    });

    const bool squared = accounting == DoerflerAccounting::sum_of_squares;
    double total = 0.0;
    for (double v : err.eta) total += squared ? v * v : v;
    if (total == 0.0) return out;
    const double target = squared ? theta * theta * total : theta * total;

    double cumulative = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = err.eta[order[k]];
        if (v == 0.0) break;  // theta = 1 marks the positive-indicator elements only
        out.marked.push_back(order[k]);
        cumulative += squared ? v * v : v;
        if (cumulative >= target) break;
    }
    std::sort(out.marked.begin(), out.marked.end());
    return out;
}

RefineOutcome refine_cycle(const State& state, const Mesh1D& mesh, const RefineParams& params,
                           const std::vector<std::vector<double>>& extra_fields) {
    RefineOutcome out;
    out.error_before = estimate(state, mesh, params.quad_order);

    switch (params.strategy) {
        case MarkingStrategy::none:
            out.marks = MarkSet{};
            break;
        case MarkingStrategy::max_threshold:
            out.marks = mark_max(out.error_before, params.parameter);
            break;
        case MarkingStrategy::doerfler:
            out.marks = mark_doerfler(out.error_before, params.parameter, params.accounting);
            break;
    }

    // Depth guard against runaway refinement at the singularity.
    std::vector<std::size_t> admissible;
    for (std::size_t e : out.marks.marked) {
        if (mesh.generation[e] >= params.max_generation)
            ++out.n_capped;
        else
            admissible.push_back(e);
    }
    if (admissible.empty() && !out.marks.marked.empty())
        throw RefinementExhausted("refine_cycle: every marked element is at max generation");

    // Element budget: keep only the highest-indicator marks that fit.
    if (params.max_elements > 0 && mesh.n_elements() + admissible.size() > params.max_elements) {
        const std::size_t slots = params.max_elements > mesh.n_elements()
                                      ? params.max_elements - mesh.n_elements()
                                      : 0;
        if (slots == 0 && !admissible.empty())
            throw RefinementExhausted("refine_cycle: element budget exhausted");
        std::stable_sort(admissible.begin(), admissible.end(),
                         [&](std::size_t a, std::size_t b) {
                             return out.error_before.eta[a] > out.error_before.eta[b];
                         });
        out.n_trimmed = admissible.size() - slots;
        admissible.resize(slots);
        std::sort(admissible.begin(), admissible.end());
    }
    out.marks.marked = std::move(admissible);

    std::vector<std::vector<double>> fields = {state.u, state.h, state.s};
    fields.insert(fields.end(), extra_fields.begin(), extra_fields.end());
    BisectResult bis = bisect(mesh, out.marks.marked, fields);

    out.mesh = std::move(bis.mesh);
    out.state.u = std::move(bis.fields[0]);
    out.state.h = std::move(bis.fields[1]);
    out.state.s = std::move(bis.fields[2]);
    out.state.length = state.length;
    out.state.time = state.time;
    out.extra_fields.assign(bis.fields.begin() + 3, bis.fields.end());
    return out;
}

}  // namespace dropletfem
