// Separation of two nearby particles in a frozen random vorticity field.
#include <cstdio>

#include "osgood/osgood.hpp"
#include "../tools/cli.hpp"

int main() {
  using namespace osgood;
  const GridField w = cli::random_band_limited(64, Domain::Torus2Pi, 7);
  const auto tr = flow::twin_flow_experiment(w, 0.0, 1e-4, 1.0, GrowthFunction::constant(1.0, 4.0), {});
  for (std::size_t i = 0; i < tr.t.size(); i += 10)
    std::printf("t=%.3f  delta=%.4e  bound=%.4e\n", tr.t[i], tr.delta[i], tr.osgood_bound[i]);
  std::printf("bound %s\n", tr.bound_holds ? "holds" : "violated");
}
