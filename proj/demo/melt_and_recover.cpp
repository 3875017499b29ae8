// March a melting slab forward, then recover the heat influx from its front.
#include <cstdio>

#include "stefan/stefan.hpp"

int main() {
    using namespace stefan;
    const StefanCase c = make_fixture(Fixture::example1);

    const auto grid = plan_grid(c, 40);
    const auto direct = solve_direct(c, grid);
    std::printf("direct: %zu steps, s(T) = %.6f (exact %.6f)\n", grid.steps, direct.path.s.back(),
                c.exact->front(c.T));

    const auto path = resample_path(direct.path, 400);
    const auto sys = assemble_system(path, c, rule_nodes(RuleName::gauss3));
    const auto fit = tikhonov_solve(sys, {1e-3, PriorMode::exact, {}}, c);

    std::printf("%8s %12s %12s\n", "t", "h", "h_exact");
    for (std::size_t j = 0; j < sys.size(); j += sys.size() / 8) {
        const double t = sys.node_times[j];
        std::printf("%8.4f %12.6f %12.6f\n", t, fit.h[j], c.exact->influx(t));
    }
    return 0;
}
