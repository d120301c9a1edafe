#include "pmm/dp.hpp"

namespace pmm {

// The DP templates are header-only; pin the two domain instantiations here
// so downstream targets don't each re-instantiate them.

template struct DeltaTable<LogDomain>;
template struct DeltaTable<ExactDomain>;
template struct SegMatrix<LogDomain>;
template struct SegMatrix<ExactDomain>;
template struct Decode<LogDomain>;
template struct Decode<ExactDomain>;

template DeltaTable<LogDomain> delta_forward<LogDomain>(const Model&, const ObsSeq&, bool);
template DeltaTable<ExactDomain> delta_forward<ExactDomain>(const Model&, const ObsSeq&, bool);

template SegMatrix<LogDomain> segment_max<LogDomain>(const Model&, const ObsSeq&, int, int);
template SegMatrix<ExactDomain> segment_max<ExactDomain>(const Model&, const ObsSeq&, int, int);

template Decode<LogDomain> constrained_path<LogDomain>(const Model&, const ObsSeq&,
                                                       std::optional<int>, std::optional<int>,
                                                       bool, const TieRule&, bool);
template Decode<ExactDomain> constrained_path<ExactDomain>(const Model&, const ObsSeq&,
                                                           std::optional<int>, std::optional<int>,
                                                           bool, const TieRule&, bool);

template Decode<LogDomain> viterbi_path<LogDomain>(const Model&, const ObsSeq&, const TieRule&, bool);
template Decode<ExactDomain> viterbi_path<ExactDomain>(const Model&, const ObsSeq&, const TieRule&, bool);

template Decode<LogDomain> brute_force_oracle<LogDomain>(const Model&, const ObsSeq&,
                                                         std::optional<int>, std::optional<int>, bool);
template Decode<ExactDomain> brute_force_oracle<ExactDomain>(const Model&, const ObsSeq&,
                                                             std::optional<int>, std::optional<int>, bool);

}  // namespace pmm
