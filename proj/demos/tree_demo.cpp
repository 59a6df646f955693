// Embeds the directed hierarchy tree in the Randers plane and prints the
// mean drift coordinate per depth.

#include <cstdio>
#include <vector>

#include "fmds/fmds.hpp"

int main() {
  using namespace fmds;
  const GeneratedGraph tree = gen_tree(GeneratorSpec::defaults(DatasetKind::tree));
  const DissimilarityMatrix d = all_pairs_distances(tree.graph);
  const RandersSpace space = RandersSpace::along_last_axis(2, 0.5);
  const SolveOutput out = run_finsler_smacof(d, WeightMatrix::uniform(d.size()), space);

  std::vector<double> sum(8, 0.0);
  std::vector<int> count(8, 0);
  for (Index i = 0; i < d.size(); ++i) {
    sum[tree.depth[i]] += out.embedding(i, 1);
    ++count[tree.depth[i]];
  }
  for (int level = 0; level < 8; ++level) {
    std::printf("depth %d: mean drift coordinate %+.3f\n", level, sum[level] / count[level]);
  }
  Vector depth(d.size());
  for (Index i = 0; i < d.size(); ++i) depth(i) = tree.depth[i];
  std::printf("spearman(depth, drift coordinate) = %.3f\n", spearman_correlation(depth, out.embedding.col(1)));
  return 0;
}
