#include "irtbench/errors.hpp"

namespace irtbench {

const char* errc_name(errc c) {
  switch (c) {
    case errc::ragged_rows: return "RaggedRows";
    case errc::non_binary_cell: return "NonBinaryCell";
    case errc::duplicate_id: return "DuplicateId";
    case errc::empty_matrix: return "EmptyMatrix";
    case errc::empty_labels: return "EmptyLabels";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::too_small: return "TooSmall";
    case errc::empty_item_list: return "EmptyItemList";
    case errc::empty_profiles: return "EmptyProfiles";
    case errc::missing_score: return "MissingScore";
    case errc::fewer_than_two_players: return "FewerThanTwoPlayers";
    case errc::id_mismatch: return "IdMismatch";
    case errc::volatility_non_convergence: return "VolatilityNonConvergence";
    case errc::bad_config: return "BadConfig";
  }
  return "UnknownError";
}

}  // namespace irtbench
