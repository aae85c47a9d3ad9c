#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace verity::ledger {

using SecretKey = std::array<std::uint8_t, 32>;

/// Test hook for simulating misbehaving peers.
enum class PeerBehavior { Honest, Refuse, BadSignature };

/// A ledger peer holding an Ed25519 key pair.
class Peer {
 public:
  Peer(std::string id, const SecretKey& secret);
  ~Peer();
  Peer(Peer&&) noexcept;
  Peer& operator=(Peer&&) noexcept;

  const std::string& id() const noexcept { return id_; }
  const SecretKey& secret() const noexcept { return secret_; }
  const std::string& public_key() const noexcept { return public_key_; }

  std::string sign(std::string_view message) const;
  bool verify(std::string_view message, std::string_view signature) const;

  PeerBehavior behavior = PeerBehavior::Honest;

 private:
  struct Key;
  std::string id_;
  SecretKey secret_;
  std::string public_key_;
  std::unique_ptr<Key> key_;
};

/// The set of peers taking part in endorsement.
class PeerNetwork {
 public:
  /// Peers `peer0..peer{n-1}` with keys SHA-256(seed || peer_id).
  static PeerNetwork deterministic(std::size_t n, std::string_view seed);
  /// Peers with keys from the system CSPRNG.
  static PeerNetwork random(std::size_t n);
  /// Reads `peer_id<TAB>hex-secret` lines.
  static PeerNetwork load(const std::string& path);
  void save(const std::string& path) const;

  explicit PeerNetwork(std::vector<Peer> peers);

  std::size_t size() const noexcept { return peers_.size(); }
  /// ceil((n + 1) / 2).
  std::size_t quorum() const noexcept { return (peers_.size() + 2) / 2; }
  const std::vector<Peer>& peers() const noexcept { return peers_; }
  std::vector<Peer>& peers() noexcept { return peers_; }
  const Peer* find(std::string_view id) const;

 private:
  std::vector<Peer> peers_;
};

}  // namespace verity::ledger
