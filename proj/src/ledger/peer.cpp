#include "verity/ledger/peer.hpp"

#include <sodium.h>

#include <fstream>
#include <set>
#include <stdexcept>

#include "verity/errors.hpp"
#include "verity/fingerprint/fingerprint.hpp"

namespace verity::ledger {

struct Peer::Key {
  std::array<unsigned char, crypto_sign_SECRETKEYBYTES> secret{};
  std::array<unsigned char, crypto_sign_PUBLICKEYBYTES> public_key{};
};

namespace {

void ensure_sodium() {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw std::runtime_error("libsodium initialization failed");
}

const unsigned char* bytes_of(std::string_view s) {
  return reinterpret_cast<const unsigned char*>(s.data());
}

}  // namespace

Peer::Peer(std::string id, const SecretKey& secret)
    : id_(std::move(id)), secret_(secret), key_(std::make_unique<Key>()) {
  ensure_sodium();
  if (crypto_sign_seed_keypair(key_->public_key.data(), key_->secret.data(), secret_.data()) != 0) {
    throw std::runtime_error("cannot create Ed25519 key for " + id_);
  }
  public_key_.assign(key_->public_key.begin(), key_->public_key.end());
}

Peer::~Peer() = default;
Peer::Peer(Peer&&) noexcept = default;
Peer& Peer::operator=(Peer&&) noexcept = default;

std::string Peer::sign(std::string_view message) const {
  std::string sig(crypto_sign_BYTES, '\0');
  crypto_sign_detached(reinterpret_cast<unsigned char*>(sig.data()), nullptr, bytes_of(message),
                       message.size(), key_->secret.data());
  return sig;
}

bool Peer::verify(std::string_view message, std::string_view signature) const {
  if (signature.size() != crypto_sign_BYTES) return false;
  return crypto_sign_verify_detached(bytes_of(signature), bytes_of(message), message.size(),
                                     key_->public_key.data()) == 0;
}

PeerNetwork::PeerNetwork(std::vector<Peer> peers) : peers_(std::move(peers)) {
  if (peers_.empty()) throw std::invalid_argument("a peer network needs at least one peer");
  std::set<std::string> ids;
  for (const auto& p : peers_) {
    if (!ids.insert(p.id()).second) throw std::invalid_argument("duplicate peer id " + p.id());
  }
}

PeerNetwork PeerNetwork::deterministic(std::size_t n, std::string_view seed) {
  std::vector<Peer> peers;
  for (std::size_t i = 0; i < n; ++i) {
    std::string id = "peer" + std::to_string(i);
    const auto d = fp::sha256(std::string(seed) + id);
    SecretKey sk;
    std::copy(d.begin(), d.end(), sk.begin());
    peers.emplace_back(std::move(id), sk);
  }
  return PeerNetwork(std::move(peers));
}

PeerNetwork PeerNetwork::random(std::size_t n) {
  std::vector<Peer> peers;
  for (std::size_t i = 0; i < n; ++i) {
    ensure_sodium();
    SecretKey sk;
    randombytes_buf(sk.data(), sk.size());
    peers.emplace_back("peer" + std::to_string(i), sk);
  }
  return PeerNetwork(std::move(peers));
}

PeerNetwork PeerNetwork::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open peer key file " + path);
  std::vector<Peer> peers;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    auto secret = tab == std::string::npos ? std::nullopt
                                           : fp::digest_from_hex(line.substr(tab + 1));
    if (!secret) throw std::runtime_error("malformed peer key line in " + path);
    SecretKey sk;
    std::copy(secret->begin(), secret->end(), sk.begin());
    peers.emplace_back(line.substr(0, tab), sk);
  }
  return PeerNetwork(std::move(peers));
}

void PeerNetwork::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  for (const auto& p : peers_) {
    fp::Digest d;
    std::copy(p.secret().begin(), p.secret().end(), d.begin());
    out << p.id() << '\t' << fp::to_hex(d) << '\n';
  }
  if (!out.flush()) throw std::runtime_error("cannot write peer key file " + path);
}

const Peer* PeerNetwork::find(std::string_view id) const {
  for (const auto& p : peers_) {
    if (p.id() == id) return &p;
  }
  return nullptr;
}

}  // namespace verity::ledger
