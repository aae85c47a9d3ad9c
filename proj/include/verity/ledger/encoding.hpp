#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "verity/ledger/types.hpp"

namespace verity::ledger {

/// Canonical encoding: each field is a u32 big-endian length followed by its
/// bytes. Integers are decimal ASCII. A list is a count field followed by one
/// field per element.
class Encoder {
 public:
  Encoder& field(std::string_view bytes);
  Encoder& integer(std::int64_t v);
  Encoder& digest(const Digest& d);
  Encoder& optional_digest(const std::optional<Digest>& d);
  std::string take() { return std::move(out_); }
  const std::string& bytes() const noexcept { return out_; }

 private:
  std::string out_;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Decoder {
 public:
  explicit Decoder(std::string_view in) : in_(in) {}

  std::string_view field();
  std::int64_t integer();
  Digest digest();
  std::optional<Digest> optional_digest();
  bool done() const noexcept { return pos_ == in_.size(); }
  /// Throws unless every byte was consumed.
  void finish() const;

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

void put_u32(std::string& out, std::uint32_t v);
std::uint32_t get_u32(std::string_view bytes, std::size_t offset);

/// Bytes signed by the submitter and every endorsing peer.
std::string encode_payload(const TxDraft& draft, std::string_view owner);
std::string encode_tx(const LedgerTx& tx);
LedgerTx decode_tx(std::string_view bytes);

/// Encoding of (height, prev_hash, timestamp, txs): the bytes that are hashed
/// and persisted.
std::string encode_block(const Block& block);
/// Decodes a block body; block_hash is left zeroed. Throws DecodeError.
Block decode_block(std::string_view bytes);

Digest hash_block(const Block& block);

}  // namespace verity::ledger
