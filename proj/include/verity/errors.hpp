#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace verity {

/// Base of every error raised by the gateway.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- sql frontend ----

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::vector<std::string> expected,
              const std::string& message);

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

class UnsupportedFeature : public Error {
 public:
  UnsupportedFeature(std::string feature, std::size_t position);

  const std::string& feature() const noexcept { return feature_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::string feature_;
  std::size_t position_;
};

// ---- name resolution ----

class UnknownTable : public Error {
 public:
  using Error::Error;
};
class UnknownColumn : public Error {
 public:
  using Error::Error;
};
class AmbiguousColumn : public Error {
 public:
  using Error::Error;
};

// ---- storage ----

class DuplicateTable : public Error {
 public:
  using Error::Error;
};
class BadType : public Error {
 public:
  using Error::Error;
};
class DuplicateColumn : public Error {
 public:
  using Error::Error;
};
class TypeError : public Error {
 public:
  using Error::Error;
};
class ArityError : public Error {
 public:
  using Error::Error;
};
class DuplicatePrimaryKey : public Error {
 public:
  using Error::Error;
};
class NoSuchRow : public Error {
 public:
  using Error::Error;
};
class EvalError : public Error {
 public:
  using Error::Error;
};

// ---- fingerprint ----

class NullPrimaryKey : public Error {
 public:
  using Error::Error;
};

// ---- ledger ----

class EndorsementFailed : public Error {
 public:
  EndorsementFailed(std::size_t tx_index, const std::string& reason);
  std::size_t tx_index() const noexcept { return tx_index_; }

 private:
  std::size_t tx_index_;
};

class StaleState : public Error {
 public:
  StaleState(std::size_t tx_index, const std::string& reason);
  std::size_t tx_index() const noexcept { return tx_index_; }

 private:
  std::size_t tx_index_;
};

class DuplicateRowId : public Error {
 public:
  DuplicateRowId(std::size_t tx_index, const std::string& row_id_hex);
  std::size_t tx_index() const noexcept { return tx_index_; }

 private:
  std::size_t tx_index_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class LedgerCorrupted : public Error {
 public:
  using Error::Error;
};

// ---- verifier ----

class NonScalarSubquery : public Error {
 public:
  using Error::Error;
};
class PkUpdateUnsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace verity
