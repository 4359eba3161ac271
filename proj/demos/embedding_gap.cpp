// Plain versus sharp Yudovich norms of the LogPower example as the grid refines.
#include <cstdio>

#include "osgood/osgood.hpp"

int main() {
  using namespace osgood;
  const GrowthFunction theta = GrowthFunction::power(1.0, 1.0);
  std::printf("%6s %12s %12s\n", "n", "plain", "sharp");
  for (int n : {64, 128, 256}) {
    examples::ExampleSpec s;
    s.n = n;
    const GridField f = examples::build_example(s);
    const EmbeddingGap e = embedding_gap_report(f, theta, 1.0, 0.25);
    std::printf("%6d %12.6f %12.6f\n", n, e.plain.direct_value, e.sharp.direct_value);
  }
}
