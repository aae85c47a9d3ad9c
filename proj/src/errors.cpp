#include "verity/errors.hpp"

#include <utility>

namespace verity {

SyntaxError::SyntaxError(std::size_t position, std::vector<std::string> expected,
                         const std::string& message)
    : Error(message), position_(position), expected_(std::move(expected)) {}

UnsupportedFeature::UnsupportedFeature(std::string feature, std::size_t position)
    : Error("unsupported SQL feature '" + feature + "' at position " +
            std::to_string(position)),
      feature_(std::move(feature)),
      position_(position) {}

EndorsementFailed::EndorsementFailed(std::size_t tx_index, const std::string& reason)
    : Error("endorsement failed for tx " + std::to_string(tx_index) + ": " + reason),
      tx_index_(tx_index) {}

StaleState::StaleState(std::size_t tx_index, const std::string& reason)
    : Error("stale state at tx " + std::to_string(tx_index) + ": " + reason),
      tx_index_(tx_index) {}

DuplicateRowId::DuplicateRowId(std::size_t tx_index, const std::string& row_id_hex)
    : Error("duplicate row id " + row_id_hex + " at tx " + std::to_string(tx_index)),
      tx_index_(tx_index) {}

}  // namespace verity
