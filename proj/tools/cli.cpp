#include "verity/cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include "verity/bench/bench.hpp"
#include "verity/errors.hpp"
#include "verity/fingerprint/fingerprint.hpp"
#include "verity/fixtures/tpch.hpp"
#include "verity/ledger/simulated_ledger.hpp"
#include "verity/sql/parser.hpp"
#include "verity/storage/database.hpp"
#include "verity/verifier/verifier.hpp"

namespace verity::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string resolve(const std::string& base, const std::string& value) {
  if (value.empty()) return value;
  const fs::path p(value);
  return p.is_absolute() ? value : (fs::path(base) / p).lexically_normal().string();
}

double ms(std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); }

json to_json(const storage::Value& v) {
  switch (v.kind()) {
    case storage::Value::Kind::Null:
      return nullptr;
    case storage::Value::Kind::Integer:
      return v.as_integer();
    default:
      return v.to_display();  // decimals as strings keep their exact digits
  }
}

/// Output keys: empty names become colN, repeats get a positional suffix.
std::vector<std::string> json_keys(const std::vector<std::string>& columns) {
  std::vector<std::string> keys;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    std::string k = columns[i].empty() ? "col" + std::to_string(i + 1) : columns[i];
    if (!seen.insert(k).second) {
      k += "_" + std::to_string(i + 1);
      seen.insert(k);
    }
    keys.push_back(std::move(k));
  }
  return keys;
}

json alert_json(const verifier::TamperAlert& a) {
  static const char* const names[] = {"mismatch", "absent", "deleted"};
  return {{"row_id", a.row_id.hex()},
          {"table", a.table},
          {"expectation", names[static_cast<int>(a.expectation)]},
          {"expected", a.expected ? json(a.expected->hex()) : json(nullptr)},
          {"computed", a.computed.hex()},
          {"query_hash", a.query_hash},
          {"timestamp", verifier::iso_timestamp(a.timestamp)}};
}

json report_json(const verifier::VerificationReport& r) {
  json alerts = json::array();
  for (const auto& a : r.alerts) alerts.push_back(alert_json(a));
  return {{"query_kind", sql::to_string(r.query_kind)},
          {"tables", r.tables_touched},
          {"tuples_checked", r.tuples_checked},
          {"tuples_mutated", r.tuples_mutated},
          {"ledger_txs_committed", r.ledger_txs_committed},
          {"outcome", verifier::to_string(r.outcome)},
          {"elapsed_ms",
           {{"parse", ms(r.elapsed.parse)},
            {"rewrite", ms(r.elapsed.rewrite)},
            {"db_exec", ms(r.elapsed.db_exec)},
            {"ledger_lookup", ms(r.elapsed.ledger_lookup)},
            {"ledger_commit", ms(r.elapsed.ledger_commit)},
            {"total", ms(r.elapsed.total())}}},
          {"alerts", alerts}};
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void print_report(const verifier::VerificationReport& r, std::ostream& out) {
  std::ostringstream line;
  line << std::fixed << std::setprecision(3);
  line << "-- " << verifier::to_string(r.outcome) << ' ' << sql::to_string(r.query_kind)
       << " tables=" << join(r.tables_touched, ",") << " checked=" << r.tuples_checked
       << " mutated=" << r.tuples_mutated << " txs=" << r.ledger_txs_committed
       << " total_ms=" << ms(r.elapsed.total()) << " (parse " << ms(r.elapsed.parse)
       << ", rewrite " << ms(r.elapsed.rewrite) << ", db " << ms(r.elapsed.db_exec)
       << ", lookup " << ms(r.elapsed.ledger_lookup) << ", commit "
       << ms(r.elapsed.ledger_commit) << ")";
  out << line.str() << '\n';
}

void print_table(const std::vector<std::string>& columns, const std::vector<storage::Row>& rows,
                 std::ostream& out) {
  std::vector<std::size_t> width(columns.size());
  std::vector<std::vector<std::string>> cells;
  for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
  for (const auto& row : rows) {
    auto& line = cells.emplace_back();
    for (std::size_t c = 0; c < row.size(); ++c) {
      line.push_back(row[c].to_display());
      width[c] = std::max(width[c], line.back().size());
    }
  }
  auto emit = [&](const std::vector<std::string>& line) {
    std::string s;
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) s += " | ";
      s += line[c];
      if (c + 1 < line.size()) s.append(width[c] - line[c].size(), ' ');
    }
    out << s << '\n';
  };
  emit(columns);
  std::string rule;
  for (std::size_t c = 0; c < width.size(); ++c) {
    if (c) rule += "-+-";
    rule.append(width[c], '-');
  }
  out << rule << '\n';
  for (const auto& line : cells) emit(line);
  out << '(' << rows.size() << (rows.size() == 1 ? " row)" : " rows)") << '\n';
}

std::string create_table_text(const storage::TableDef& def) {
  std::string s = "CREATE TABLE " + def.name + " (";
  for (const auto& c : def.columns) s += c.name + " " + storage::to_string(c.type) + ", ";
  return s + "PRIMARY KEY (" + join(def.primary_key, ", ") + "))";
}

/// Database, ledger and verifier for one command.
class Session {
 public:
  Session(SessionConfig cfg, ledger::SimulatedLedger led, storage::Database db)
      : cfg_(std::move(cfg)), ledger_(std::move(led)), db_(std::move(db)) {
    verifier::VerifierOptions vo;
    vo.audit_log_path = cfg_.audit_log;
    vo.principal = cfg_.principal;
    verifier_ = std::make_unique<verifier::Verifier>(db_, ledger_, vo);
  }

  static std::unique_ptr<Session> open(const SessionConfig& cfg, std::ostream& err) {
    if (!fs::exists(cfg.keys_path()) || !fs::exists(cfg.ledger)) {
      throw std::runtime_error("ledger " + cfg.ledger + " is not initialized; run `verity init`");
    }
    auto db = load_database(cfg, nullptr);
    auto led = ledger::SimulatedLedger::open(cfg.ledger, ledger::PeerNetwork::load(cfg.keys_path()));
    const auto chain = led.verify_chain();
    if (!chain.ok) {
      err << "warning: ledger chain damaged at height " << chain.first_bad_height.value_or(0)
          << ": " << chain.detail << '\n';
    }
    return std::make_unique<Session>(cfg, std::move(led), std::move(db));
  }

  /// DDL plus one CSV per table; a missing CSV leaves its table empty.
  static storage::Database load_database(const SessionConfig& cfg, std::ostream* warn) {
    storage::Database db;
    db.create_tables(read_file(cfg.ddl));
    const storage::CsvOptions opts{cfg.null_literal};
    for (const auto& def : db.catalog().tables()) {
      const auto path = (fs::path(cfg.data_dir) / (def.name + ".csv")).string();
      std::ifstream in(path, std::ios::binary);
      if (!in) {
        if (warn) *warn << "warning: no CSV for table " << def.name << " (" << path << "), loading it empty\n";
        continue;
      }
      try {
        db.load_csv(def.name, in, opts);
      } catch (const Error& e) {
        throw std::runtime_error(path + ": " + e.what());
      }
    }
    return db;
  }

  /// Rewrites the CSVs of `tables` through a temporary file each.
  void persist(const std::vector<std::string>& tables) const {
    const storage::CsvOptions opts{cfg_.null_literal};
    fs::create_directories(cfg_.data_dir);
    for (const auto& name : tables) {
      if (!db_.catalog().contains(name)) continue;
      const auto path = fs::path(cfg_.data_dir) / (name + ".csv");
      auto tmp = path;
      tmp += ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        db_.write_csv(name, out, opts);
        if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
      }
      fs::rename(tmp, path);
    }
  }

  const SessionConfig& config() const { return cfg_; }
  storage::Database& db() { return db_; }
  ledger::SimulatedLedger& ledger() { return ledger_; }
  verifier::Verifier& verifier() { return *verifier_; }

 private:
  SessionConfig cfg_;
  ledger::SimulatedLedger ledger_;
  storage::Database db_;
  std::unique_ptr<verifier::Verifier> verifier_;
};

/// Prints an error and returns its exit code. Syntax errors already name
/// their position.
int report_error(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  return kExitError;
}

void print_alerts(const std::vector<verifier::TamperAlert>& alerts, OutputFormat format,
                  std::ostream& out) {
  for (const auto& a : alerts) {
    if (format == OutputFormat::Json) {
      out << json{{"alert", alert_json(a)}}.dump() << '\n';
    } else {
      out << "ALERT " << verifier::format_alert(a) << '\n';
    }
  }
}

/// Runs one statement through the verifier and prints its outcome.
int run_statement(Session& s, const std::string& text, std::ostream& out, std::ostream& err) {
  const auto format = s.config().format;
  try {
    auto result = s.verifier().process(text, s.config().principal);
    const auto& r = result.report;
    if (r.query_kind != sql::QueryKind::Select && result.block_height) {
      s.persist(r.tables_touched);
    }
    if (format == OutputFormat::Json) {
      if (r.query_kind == sql::QueryKind::Select) {
        const auto keys = json_keys(result.columns);
        for (const auto& row : result.rows) {
          json obj = json::object();
          for (std::size_t c = 0; c < row.size(); ++c) obj[keys[c]] = to_json(row[c]);
          out << obj.dump() << '\n';
        }
      }
      json rep = report_json(r);
      if (r.query_kind != sql::QueryKind::Select) {
        rep["rows_affected"] = result.rows_affected;
        rep["block_height"] = result.block_height ? json(*result.block_height) : json(nullptr);
      }
      out << json{{"report", rep}}.dump() << '\n';
    } else {
      if (r.query_kind == sql::QueryKind::Select) {
        print_table(result.columns, result.rows, out);
      } else {
        out << result.rows_affected << (result.rows_affected == 1 ? " row" : " rows")
            << " affected";
        if (result.block_height) out << ", committed in block " << *result.block_height;
        out << '\n';
      }
      print_report(r, out);
    }
    return kExitOk;
  } catch (const verifier::TamperDetected& e) {
    print_alerts(e.alerts(), format, out);
    if (format == OutputFormat::Json) {
      out << json{{"report", report_json(e.report())}}.dump() << '\n';
    } else {
      print_report(e.report(), out);
    }
    err << "tamper detected: " << e.alerts().size() << " tuple(s) failed verification, results withheld\n";
    return kExitTamper;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int audit(Session& s, const std::string& mode, std::ostream& out) {
  const auto format = s.config().format;
  if (mode == "counts") {
    const auto mismatches = s.verifier().audit_counts();
    for (const auto& m : mismatches) {
      if (format == OutputFormat::Json) {
        out << json{{"count_mismatch",
                     {{"table", m.table},
                      {"db_count", m.db_count},
                      {"ledger_count", m.ledger_count ? json(*m.ledger_count) : json(nullptr)}}}}
                   .dump()
            << '\n';
      } else {
        out << "count mismatch: " << m.table << " db=" << m.db_count << " ledger="
            << (m.ledger_count ? std::to_string(*m.ledger_count) : std::string("uninitialized"))
            << '\n';
      }
    }
    if (format == OutputFormat::Table) {
      out << (mismatches.empty() ? "count audit clean" : "count audit found " +
                                                             std::to_string(mismatches.size()) +
                                                             " mismatch(es)")
          << '\n';
    }
    return mismatches.empty() ? kExitOk : kExitTamper;
  }
  if (mode == "full") {
    const auto result = s.verifier().audit_full();
    print_alerts(result.alerts, format, out);
    for (const auto& m : result.missing) {
      if (format == OutputFormat::Json) {
        out << json{{"missing_row", {{"row_id", m.row_id.hex()}, {"table", m.table}}}}.dump() << '\n';
      } else {
        out << "MISSING " << m.table << '\t' << m.row_id.hex() << '\n';
      }
    }
    if (format == OutputFormat::Table) {
      if (result.clean()) {
        out << "full audit clean\n";
      } else {
        out << "full audit found " << result.alerts.size() << " alert(s) and "
            << result.missing.size() << " missing row(s)\n";
      }
    }
    return result.clean() ? kExitOk : kExitTamper;
  }
  throw std::invalid_argument("audit mode must be counts or full, got '" + mode + "'");
}

storage::Row parse_key(const storage::TableDef& def, const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (text.empty()) parts.emplace_back();
  if (parts.size() != def.pk_indices.size()) {
    throw std::invalid_argument("table " + def.name + " has a " +
                                std::to_string(def.pk_indices.size()) +
                                "-column key; separate key values with commas");
  }
  storage::Row key;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    key.push_back(storage::parse_typed(parts[i], def.columns[def.pk_indices[i]].type));
  }
  return key;
}

std::optional<ledger::RowId> lookup_rid(Session& s, const std::vector<std::string>& args) {
  if (args.size() == 1) return ledger::RowId::from_hex(args[0]);
  if (args.size() == 2) {
    const auto& def = s.db().catalog().at(args[0]);
    return fp::row_id(parse_key(def, args[1]), def.name);
  }
  return std::nullopt;
}

int ledger_cmd(Session& s, const std::string& mode, const std::vector<std::string>& args,
               std::ostream& out, std::ostream& err) {
  const auto format = s.config().format;
  if (mode == "verify") {
    const auto r = s.ledger().verify_chain();
    if (format == OutputFormat::Json) {
      out << json{{"chain",
                   {{"ok", r.ok},
                    {"blocks", r.blocks},
                    {"head_height", r.head_height},
                    {"first_bad_height",
                     r.first_bad_height ? json(*r.first_bad_height) : json(nullptr)},
                    {"detail", r.detail}}}}
                 .dump()
          << '\n';
    } else if (r.ok) {
      out << "chain ok, head height " << r.head_height << '\n';
    } else {
      out << "chain broken at height " << r.first_bad_height.value_or(0) << ": " << r.detail
          << '\n';
    }
    return r.ok ? kExitOk : kExitTamper;
  }
  if (mode == "history") {
    const auto rid = lookup_rid(s, args);
    if (!rid) {
      err << "error: history takes a row id in hex, or a table and key\n";
      return kExitError;
    }
    const auto entries = s.ledger().history(*rid);
    if (entries.empty()) {
      err << "error: no ledger history for row id " << rid->hex() << '\n';
      return kExitError;
    }
    for (const auto& h : entries) {
      if (format == OutputFormat::Json) {
        out << json{{"history",
                     {{"height", h.height},
                      {"kind", ledger::to_string(h.kind)},
                      {"owner", h.owner},
                      {"fingerprint", h.fingerprint.hex()}}}}
                   .dump()
            << '\n';
      } else {
        out << h.height << '\t' << ledger::to_string(h.kind) << '\t' << h.owner << '\t'
            << h.fingerprint.hex() << '\n';
      }
    }
    return kExitOk;
  }
  throw std::invalid_argument("ledger mode must be verify or history, got '" + mode + "'");
}

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> words;
  for (std::string w; ss >> w;) words.push_back(w);
  return words;
}

int meta_command(Session& s, const std::string& line, std::ostream& out, std::ostream& err) {
  const auto words = split_words(line);
  const auto& cmd = words[0];
  try {
    if (cmd == ".tables") {
      for (const auto& def : s.db().catalog().tables()) {
        out << def.name << '\t' << s.db().row_count(def.name) << '\n';
      }
      return kExitOk;
    }
    if (cmd == ".schema" && words.size() == 2) {
      out << create_table_text(s.db().catalog().at(words[1])) << '\n';
      return kExitOk;
    }
    if (cmd == ".audit" && words.size() == 2) return audit(s, words[1], out);
    if (cmd == ".ledger" && words.size() >= 2) {
      return ledger_cmd(s, words[1], {words.begin() + 2, words.end()}, out, err);
    }
    err << "error: unknown command '" << line
        << "' (try .tables, .schema T, .audit counts|full, .ledger verify|history <rowid>, .quit)\n";
    return kExitError;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int repl(Session& s, std::istream& in, std::ostream& out, std::ostream& err) {
  int last = kExitOk;
  std::string line;
  while (true) {
    out << "verity> " << std::flush;
    if (!std::getline(in, line)) break;
    const auto text = trim(line);
    if (text.empty() || text.starts_with("--")) continue;
    if (text == ".quit" || text == ".exit") break;
    last = text.front() == '.' ? meta_command(s, text, out, err) : run_statement(s, text, out, err);
  }
  out << '\n';
  return last;
}

int exec(Session& s, const std::string& script, std::ostream& out, std::ostream& err) {
  const auto statements = split_statements(script);
  if (statements.empty()) {
    err << "error: no statement given\n";
    return kExitError;
  }
  for (const auto& stmt : statements) {
    if (const int rc = run_statement(s, stmt, out, err); rc != kExitOk) return rc;
  }
  return kExitOk;
}

int init(const SessionConfig& cfg, std::ostream& out, std::ostream& err) {
  if (fs::exists(cfg.ledger) && fs::file_size(cfg.ledger) > 0) {
    err << "error: ledger " << cfg.ledger << " already exists; remove it to re-initialize\n";
    return kExitError;
  }
  auto db = Session::load_database(cfg, &err);
  auto network = cfg.peer_seed ? ledger::PeerNetwork::deterministic(cfg.peers, *cfg.peer_seed)
                               : ledger::PeerNetwork::random(cfg.peers);
  ledger::SimulatedLedger led(std::move(network));
  verifier::VerifierOptions vo;
  vo.principal = cfg.principal;
  verifier::Verifier v(db, led, vo);
  const auto counts = v.bootstrap();

  // Nothing touches disk until the bootstrap block is committed.
  if (const auto parent = fs::path(cfg.ledger).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  led.network().save(cfg.keys_path());
  try {
    led.save_as(cfg.ledger);
  } catch (...) {
    std::error_code ec;
    fs::remove(cfg.keys_path(), ec);
    fs::remove(cfg.ledger, ec);
    throw;
  }

  std::int64_t total = 0;
  for (const auto& def : db.catalog().tables()) {
    const auto n = counts.at(def.name);
    total += n;
    if (cfg.format == OutputFormat::Json) {
      out << json{{"table", def.name}, {"rows", n}}.dump() << '\n';
    } else {
      out << std::left << std::setw(12) << def.name << n << '\n';
    }
  }
  if (cfg.format == OutputFormat::Json) {
    out << json{{"total", total}, {"head_height", led.head_height()}}.dump() << '\n';
  } else {
    out << std::left << std::setw(12) << "Total" << total << '\n';
    out << "ledger " << cfg.ledger << " at head height " << led.head_height() << " with "
        << led.network().size() << " peers\n";
  }
  return kExitOk;
}

int tamper(Session& s, const std::string& table, const std::vector<std::string>& args,
           bool remove, const std::string& insert_row, std::ostream& out) {
  auto& db = s.db();
  const auto& def = db.catalog().at(table);
  if (!insert_row.empty()) {
    std::istringstream in(insert_row);
    const auto records = storage::parse_csv(in);
    if (records.size() != 1 || records[0].size() != def.columns.size()) {
      throw std::invalid_argument("--insert takes one CSV row of " +
                                  std::to_string(def.columns.size()) + " fields");
    }
    storage::Row row;
    for (std::size_t c = 0; c < def.columns.size(); ++c) {
      const auto& f = records[0][c];
      row.push_back(!f.quoted && f.text == s.config().null_literal
                        ? storage::Value::null()
                        : storage::parse_typed(f.text, def.columns[c].type));
    }
    db.raw_insert({def.name, row});
    out << "inserted unledgered row into " << def.name << ", row id "
        << fp::row_id(def.key_of(row), def.name).hex() << '\n';
  } else {
    if (args.empty()) throw std::invalid_argument("tamper needs a key, or --insert <row>");
    const auto key = parse_key(def, args[0]);
    if (remove) {
      if (args.size() != 1) throw std::invalid_argument("--delete takes only a key");
      db.raw_delete(def.name, key);
      out << "deleted " << def.name << " row " << args[0] << " without the ledger\n";
    } else {
      if (args.size() != 3) throw std::invalid_argument("tamper needs <key> <column> <value>");
      const auto& col = def.columns[def.require_column(args[1])];
      const auto value = args[2] == s.config().null_literal ? storage::Value::null()
                                                            : storage::parse_typed(args[2], col.type);
      db.raw_mutate(def.name, key, col.name, value);
      out << "set " << def.name << '.' << col.name << " = " << value.to_display() << " for key "
          << args[0] << " without the ledger\n";
    }
  }
  s.persist({def.name});
  return kExitOk;
}

int bench(Session& s, const std::string& file, const std::string& json_out, std::size_t runs,
          std::ostream& out) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  const auto queries = bench::read_queries(in);
  bench::BenchOptions opts;
  opts.runs = runs;
  opts.principal = s.config().principal;
  const auto records = bench::run_bench(s.db(), s.ledger(), queries, opts);
  const auto fit = bench::fit_records(records);

  auto record_json = [](const bench::BenchRecord& r) {
    return json{{"id", r.id},
                {"kind", r.kind},
                {"tables", r.tables},
                {"tuples_checked", r.tuples_checked},
                {"tuples_mutated", r.tuples_mutated},
                {"runs", r.runs},
                {"mean_seconds", r.mean_seconds},
                {"per_tuple_seconds", r.per_tuple_seconds()},
                {"lookup_per_tuple_seconds", r.lookup_per_tuple_seconds()},
                {"mean_phase_seconds",
                 {{"parse", ms(r.mean_phases.parse) / 1e3},
                  {"rewrite", ms(r.mean_phases.rewrite) / 1e3},
                  {"db_exec", ms(r.mean_phases.db_exec) / 1e3},
                  {"ledger_lookup", ms(r.mean_phases.ledger_lookup) / 1e3},
                  {"ledger_commit", ms(r.mean_phases.ledger_commit) / 1e3}}},
                {"error", r.error ? json(*r.error) : json(nullptr)}};
  };
  const json fit_json{{"fit",
                       {{"slope_seconds_per_tuple", fit.slope},
                        {"intercept_seconds", fit.intercept},
                        {"r_squared", fit.r_squared},
                        {"points", fit.points}}}};

  if (s.config().format == OutputFormat::Json) {
    for (const auto& r : records) out << record_json(r).dump() << '\n';
    out << fit_json.dump() << '\n';
  } else {
    std::size_t id_width = 4;
    std::size_t tables_width = 8;
    for (const auto& r : records) {
      id_width = std::max(id_width, r.id.size() + 2);
      tables_width = std::max(tables_width, join(r.tables, ",").size() + 2);
    }
    const auto iw = static_cast<int>(id_width);
    const auto tw = static_cast<int>(tables_width);
    out << std::left << std::setw(iw) << "id" << std::setw(6) << "kind" << std::setw(tw)
        << "tables" << std::right << std::setw(8) << "tuples" << std::setw(12) << "mean ms"
        << std::setw(14) << "ms/tuple" << std::setw(16) << "lookup us/tuple" << '\n';
    out << std::fixed;
    for (const auto& r : records) {
      out << std::left << std::setw(iw) << r.id << std::setw(6) << r.kind << std::setw(tw)
          << join(r.tables, ",") << std::right << std::setw(8) << r.tuples()
          << std::setprecision(3) << std::setw(12) << r.mean_seconds * 1e3 << std::setprecision(5)
          << std::setw(14) << r.per_tuple_seconds() * 1e3 << std::setprecision(3) << std::setw(16)
          << r.lookup_per_tuple_seconds() * 1e6;
      if (r.error) out << "  error: " << *r.error;
      out << '\n';
    }
    out << std::defaultfloat << std::setprecision(6) << "fit: seconds = " << fit.slope
        << " * tuples + " << fit.intercept << ", r^2 = " << fit.r_squared << " over "
        << fit.points << " queries\n";
  }
  if (!json_out.empty()) {
    std::ofstream f(json_out, std::ios::trunc);
    for (const auto& r : records) f << record_json(r).dump() << '\n';
    f << fit_json.dump() << '\n';
    if (!f.flush()) throw std::runtime_error("cannot write " + json_out);
  }
  return kExitOk;
}

int write_fixtures(const std::string& dir, double scale, std::uint64_t seed, std::ostream& out) {
  const auto counts = fixtures::TpchCounts::sf0001().scaled(scale);
  fixtures::write_fixture_dir(dir, counts, seed);
  const auto conf = fs::path(dir) / "verity.conf";
  if (!fs::exists(conf)) {
    std::ofstream f(conf);
    f << "ddl=tpch.sql\ndata_dir=.\nledger=ledger.bin\npeers=5\nprincipal=peer0\n"
         "audit_log=audit.log\n";
  }
  out << "wrote " << counts.total() << " rows of 8 tables to " << dir << '\n';
  return kExitOk;
}

std::string config_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("VERITY_CONFIG"); env && *env) return env;
  throw std::invalid_argument("no config file: pass --config <path> or set VERITY_CONFIG");
}

}  // namespace

SessionConfig parse_config(std::istream& in, const std::string& base_dir) {
  SessionConfig cfg;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(n) + ": expected key=value");
    }
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    if (key == "ddl") {
      cfg.ddl = resolve(base_dir, value);
    } else if (key == "data_dir") {
      cfg.data_dir = resolve(base_dir, value);
    } else if (key == "ledger") {
      cfg.ledger = resolve(base_dir, value);
    } else if (key == "audit_log") {
      cfg.audit_log = resolve(base_dir, value);
    } else if (key == "peers") {
      std::size_t used = 0;
      long long v = -1;
      try {
        v = std::stoll(value, &used);
      } catch (const std::exception&) {
      }
      if (used != value.size() || v < 1) {
        throw std::invalid_argument("config line " + std::to_string(n) + ": peers must be >= 1");
      }
      cfg.peers = static_cast<std::size_t>(v);
    } else if (key == "principal") {
      cfg.principal = value;
    } else if (key == "format") {
      if (value == "table") {
        cfg.format = OutputFormat::Table;
      } else if (value == "json" || value == "json-lines") {
        cfg.format = OutputFormat::Json;
      } else {
        throw std::invalid_argument("config line " + std::to_string(n) +
                                    ": format must be table or json");
      }
    } else if (key == "null_literal") {
      cfg.null_literal = value;
    } else if (key == "peer_seed") {
      cfg.peer_seed = value;
    } else {
      throw std::invalid_argument("config line " + std::to_string(n) + ": unknown key '" + key + "'");
    }
  }
  for (const auto* required : {&cfg.ddl, &cfg.ledger}) {
    if (required->empty()) throw std::invalid_argument("config must set ddl and ledger");
  }
  if (cfg.data_dir.empty()) cfg.data_dir = base_dir.empty() ? "." : base_dir;
  return cfg;
}

SessionConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_config(in, fs::absolute(path).parent_path().string());
}

std::vector<std::string> split_statements(std::string_view script) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (auto t = trim(current); !t.empty()) out.push_back(std::move(t));
    current.clear();
  };
  for (std::size_t i = 0; i < script.size(); ++i) {
    const char c = script[i];
    if (c == '\'') {
      // Copy through the closing quote; '' is an escaped quote.
      current += c;
      for (++i; i < script.size(); ++i) {
        current += script[i];
        if (script[i] == '\'') {
          if (i + 1 < script.size() && script[i + 1] == '\'') {
            current += script[++i];
          } else {
            break;
          }
        }
      }
    } else if (c == '-' && i + 1 < script.size() && script[i + 1] == '-') {
      while (i < script.size() && script[i] != '\n') ++i;
      current += '\n';
    } else if (c == ';') {
      flush();
    } else {
      current += c;
    }
  }
  flush();
  return out;
}

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Tamper-evidence gateway: every query is checked against a fingerprint ledger",
               "verity"};
  app.require_subcommand(1);
  std::string config_flag;
  std::string format_flag;
  app.add_option("--config", config_flag, "Config file (default: $VERITY_CONFIG)");
  app.add_option("--format", format_flag, "Output format, overrides the config")
      ->check(CLI::IsMember({"table", "json"}));

  auto* init_cmd = app.add_subcommand("init", "Load DDL and CSVs, fingerprint every tuple, create the ledger");

  auto* exec_cmd = app.add_subcommand("exec", "Run SQL statements through the verifier");
  std::string sql_text;
  std::string sql_file;
  exec_cmd->add_option("sql", sql_text, "Statements separated by ';'");
  exec_cmd->add_option("-f,--file", sql_file, "Read statements from a file");

  auto* repl_cmd = app.add_subcommand("repl", "Interactive shell");

  auto* tamper_cmd = app.add_subcommand("tamper", "Modify storage directly, bypassing the ledger");
  std::string tamper_table;
  std::vector<std::string> tamper_args;
  bool tamper_delete = false;
  std::string tamper_insert;
  tamper_cmd->add_option("table", tamper_table)->required();
  tamper_cmd->add_option("args", tamper_args, "<key> [<column> <value>]");
  tamper_cmd->add_flag("--delete", tamper_delete, "Delete the row with <key>");
  tamper_cmd->add_option("--insert", tamper_insert, "Insert one CSV row");

  auto* audit_cmd = app.add_subcommand("audit", "Detect deletions: counts or full scan");
  std::string audit_mode;
  audit_cmd->add_option("mode", audit_mode)->required()->check(CLI::IsMember({"counts", "full"}));

  auto* bench_cmd = app.add_subcommand("bench", "Time queries and fit runtime against tuples");
  std::string bench_file;
  std::string bench_json;
  std::size_t bench_runs = 5;
  bench_cmd->add_option("queries", bench_file, "One statement per line, optionally `id: sql`")
      ->required();
  bench_cmd->add_option("--json", bench_json, "Also write JSON lines to this file");
  bench_cmd->add_option("--runs", bench_runs, "Timed runs per query")->check(CLI::PositiveNumber);

  auto* ledger_sub = app.add_subcommand("ledger", "Inspect the ledger");
  std::string ledger_mode;
  std::vector<std::string> ledger_args;
  ledger_sub->add_option("mode", ledger_mode)->required()->check(CLI::IsMember({"verify", "history"}));
  ledger_sub->add_option("args", ledger_args, "<rowid> | <table> <key>");

  auto* fixtures_cmd = app.add_subcommand("fixtures", "Write deterministic TPC-H-shaped fixtures");
  std::string fixtures_dir;
  double fixtures_scale = 1.0;
  std::uint64_t fixtures_seed = 42;
  fixtures_cmd->add_option("--out", fixtures_dir)->required();
  fixtures_cmd->add_option("--scale", fixtures_scale, "Multiple of the SF 0.001 sizes")
      ->check(CLI::PositiveNumber);
  fixtures_cmd->add_option("--seed", fixtures_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    if (fixtures_cmd->parsed()) return write_fixtures(fixtures_dir, fixtures_scale, fixtures_seed, out);

    auto cfg = load_config(config_path(config_flag));
    if (!format_flag.empty()) cfg.format = format_flag == "json" ? OutputFormat::Json : OutputFormat::Table;
    if (init_cmd->parsed()) return init(cfg, out, err);

    auto session = Session::open(cfg, err);
    if (exec_cmd->parsed()) {
      if (sql_text.empty() == sql_file.empty()) {
        err << "error: exec takes either SQL text or -f <file>\n";
        return kExitError;
      }
      return exec(*session, sql_file.empty() ? sql_text : read_file(sql_file), out, err);
    }
    if (repl_cmd->parsed()) return repl(*session, in, out, err);
    if (tamper_cmd->parsed()) {
      return tamper(*session, tamper_table, tamper_args, tamper_delete, tamper_insert, out);
    }
    if (audit_cmd->parsed()) return audit(*session, audit_mode, out);
    if (bench_cmd->parsed()) return bench(*session, bench_file, bench_json, bench_runs, out);
    if (ledger_sub->parsed()) return ledger_cmd(*session, ledger_mode, ledger_args, out, err);
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
  return kExitError;
}

}  // namespace verity::cli
