#pragma once

#include <cstdint>
#include <vector>

#include "seqfuse/types.hpp"

namespace seqfuse {

// Independent substitution / insertion / deletion channels of a simulated
// recognizer. Substitution and deletion are exclusive per token; insertion is
// tried once before each token and once at the end.
struct NoiseModel {
  double p_sub = 0;
  double p_ins = 0;
  double p_del = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Deterministic in (model.seed, stream_id, sentence_index, gt).
Sequence perturb(const Sequence& gt, const NoiseModel& model, std::size_t alphabet_size, std::uint64_t stream_id,
                 std::uint64_t sentence_index = 0);

struct SimulatedExperiment {
  std::vector<Sequence> ground_truth;
  std::vector<std::vector<Sequence>> predictions;  // [model][sentence]
};

/// Random sentences of length min_len..max_len over `alphabet_size` tokens,
/// each perturbed by k_models independent streams.
SimulatedExperiment simulate_experiment(std::size_t n_sentences, std::size_t min_len, std::size_t max_len,
                                        std::size_t k_models, const NoiseModel& model, std::size_t alphabet_size);

}  // namespace seqfuse
