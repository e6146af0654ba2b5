#include "dialnorm/annotation/session.hpp"

#include "dialnorm/csv.hpp"
#include "dialnorm/digest.hpp"
#include "dialnorm/error.hpp"
#include "dialnorm/unicode.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

namespace dialnorm::annot {

namespace fs = std::filesystem;
using nlohmann::json;

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    const auto len = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    std::snprintf(buf + len, sizeof buf - len, ".%03dZ", static_cast<int>(ms));
    return buf;
}

std::string_view to_string(Axis a) {
    return a == Axis::Form ? "form" : "meaning";
}

Axis parse_axis(std::string_view token) {
    if (token == "form") return Axis::Form;
    if (token == "meaning") return Axis::Meaning;
    throw ValidationError("axis must be 'form' or 'meaning', got '" + std::string(token) + "'");
}

NormalizedSet load_normalized_set(const std::string& setup, const fs::path& path) {
    const auto rows = csv::parse(csv::read_file(path));
    if (rows.empty()) throw SchemaError(path.string() + ": empty file");
    const auto& header = rows.front().fields;
    const auto col = [&](std::string_view name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw SchemaError(path.string() + ": missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t id_col = col("id");
    const std::size_t text_col = col("normalized");
    NormalizedSet set{setup, {}};
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        if (f.size() != header.size()) throw RowError(rows[r].line, "expected " + std::to_string(header.size()) + " fields");
        std::size_t id = 0;
        try {
            std::size_t used = 0;
            id = std::stoul(f[id_col], &used);
            if (used != f[id_col].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw RowError(rows[r].line, "id '" + f[id_col] + "' is not a non-negative integer");
        }
        set.texts[id] = unicode::canonical(f[text_col]);
    }
    return set;
}

Session Session::create(std::string id, const Corpus& c, const std::vector<NormalizedSet>& sets, const SessionConfig& cfg) {
    if (cfg.n == 0) throw ValidationError("a session needs at least one record");
    if (cfg.n > c.size()) {
        throw ValidationError("sample size " + std::to_string(cfg.n) + " exceeds corpus size " + std::to_string(c.size()));
    }
    if (sets.empty()) throw ValidationError("a session needs at least one normalized set");
    if (cfg.annotators.empty()) throw ValidationError("a session needs at least one annotator");
    if (std::set<std::string>(cfg.annotators.begin(), cfg.annotators.end()).size() != cfg.annotators.size()) {
        throw ValidationError("duplicate annotator ids");
    }
    for (const auto& a : cfg.annotators) {
        if (a.empty()) throw ValidationError("annotator ids must be non-empty");
    }

    Session s;
    s.id_ = std::move(id);
    s.corpus_digest_ = c.source_digest;
    s.created_at_ = now_iso8601();
    s.cfg_ = cfg;
    for (const auto& set : sets) {
        if (set.setup.empty()) throw ValidationError("setup names must be non-empty");
        if (std::find(s.setups_.begin(), s.setups_.end(), set.setup) != s.setups_.end()) {
            throw ValidationError("duplicate setup '" + set.setup + "'");
        }
        s.setups_.push_back(set.setup);
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(c.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Partial Fisher-Yates: the first n slots are the sample, in draw order.
    for (std::size_t i = 0; i < cfg.n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
        std::swap(order[i], order[pick(rng)]);
    }

    std::vector<std::string> missing;
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const auto& rec = c.records[order[i]];
        AnnotationTask task;
        task.record_id = rec.id;
        task.source_text = rec.text;
        task.region = rec.region.name;
        for (const auto& set : sets) {
            const auto it = set.texts.find(rec.id);
            if (it == set.texts.end() || it->second.empty()) {
                missing.push_back(set.setup + "/" + std::to_string(rec.id));
                continue;
            }
            task.candidates.push_back({set.setup, it->second});
        }
        task.permutation.resize(sets.size());
        std::iota(task.permutation.begin(), task.permutation.end(), 0);
        std::shuffle(task.permutation.begin(), task.permutation.end(), rng);
        s.task_index_[rec.id] = s.tasks_.size();
        s.tasks_.push_back(std::move(task));
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
        throw ValidationError("missing normalized text for " + std::to_string(missing.size()) +
                              " sampled cell(s) (setup/record): " + list);
    }
    return s;
}

const AnnotationTask& Session::task(std::size_t record_id) const {
    const auto it = task_index_.find(record_id);
    if (it == task_index_.end()) throw LookupError("record " + std::to_string(record_id) + " is not in the sample");
    return tasks_[it->second];
}

void Session::validate(const std::vector<Rating>& batch) const {
    using Key = std::tuple<std::string, std::size_t, std::string>;
    std::map<Key, const Rating*> incoming;
    for (const auto& r : batch) {
        if (std::find(cfg_.annotators.begin(), cfg_.annotators.end(), r.annotator) == cfg_.annotators.end()) {
            throw LookupError("annotator '" + r.annotator + "' is not on the roster");
        }
        task(r.record_id);
        if (std::find(setups_.begin(), setups_.end(), r.setup) == setups_.end()) {
            throw LookupError("unknown setup '" + r.setup + "'");
        }
        if (r.form < 1 || r.form > 5 || r.meaning < 1 || r.meaning > 5) {
            throw ValidationError("scores must lie in 1..5 (form " + std::to_string(r.form) + ", meaning " +
                                  std::to_string(r.meaning) + ")");
        }
        if (!incoming.emplace(Key{r.annotator, r.record_id, r.setup}, &r).second) {
            throw ValidationError("batch rates setup '" + r.setup + "' twice for record " + std::to_string(r.record_id));
        }
    }

    std::set<std::pair<std::string, std::size_t>> touched;
    for (const auto& r : batch) touched.emplace(r.annotator, r.record_id);
    for (const auto& [annotator, record_id] : touched) {
        const auto& t = task(record_id);
        std::vector<const Candidate*> best_form;
        std::vector<const Candidate*> best_meaning;
        std::size_t rated = 0;
        for (const auto& cand : t.candidates) {
            const Rating* r = nullptr;
            if (auto it = incoming.find(Key{annotator, record_id, cand.setup}); it != incoming.end()) {
                r = it->second;
            } else {
                r = find(annotator, record_id, cand.setup);
            }
            if (!r) continue;
            ++rated;
            if (r->best_form) best_form.push_back(&cand);
            if (r->best_meaning) best_meaning.push_back(&cand);
        }
        for (const auto& [axis, best] : {std::pair{Axis::Form, &best_form}, std::pair{Axis::Meaning, &best_meaning}}) {
            for (const auto* cand : *best) {
                if (cand->text != best->front()->text) {
                    throw TieViolationError("record " + std::to_string(record_id) + ": several best " +
                                            std::string(to_string(axis)) + " choices with different texts ('" +
                                            best->front()->setup + "', '" + cand->setup + "')");
                }
            }
            if (rated == t.candidates.size() && best->empty()) {
                throw ValidationError("record " + std::to_string(record_id) + ": annotator '" + annotator +
                                      "' must mark one best " + std::string(to_string(axis)) + " candidate");
            }
        }
    }
}

void Session::apply(const std::vector<Rating>& batch) {
    validate(batch);
    for (const auto& r : batch) ratings_[{r.annotator, r.record_id, r.setup}] = r;
}

const Rating* Session::find(const std::string& annotator, std::size_t record_id, const std::string& setup) const {
    const auto it = ratings_.find({annotator, record_id, setup});
    return it == ratings_.end() ? nullptr : &it->second;
}

bool Session::record_complete(const std::string& annotator, std::size_t record_id) const {
    for (const auto& setup : setups_) {
        if (!find(annotator, record_id, setup)) return false;
    }
    return true;
}

std::size_t Session::done(const std::string& annotator) const {
    return static_cast<std::size_t>(std::count_if(tasks_.begin(), tasks_.end(), [&](const auto& t) {
        return record_complete(annotator, t.record_id);
    }));
}

bool Session::complete() const {
    return std::all_of(cfg_.annotators.begin(), cfg_.annotators.end(), [&](const auto& a) { return done(a) == tasks_.size(); });
}

const AnnotationTask* Session::next_task(const std::string& annotator) const {
    if (std::find(cfg_.annotators.begin(), cfg_.annotators.end(), annotator) == cfg_.annotators.end()) {
        throw LookupError("annotator '" + annotator + "' is not on the roster");
    }
    for (const auto& t : tasks_) {
        if (!record_complete(annotator, t.record_id)) return &t;
    }
    return nullptr;
}

RatingMatrix Session::export_matrix(Axis axis, const std::string& setup) const {
    if (std::find(setups_.begin(), setups_.end(), setup) == setups_.end()) {
        throw LookupError("unknown setup '" + setup + "'");
    }
    const auto n = static_cast<Eigen::Index>(tasks_.size());
    const auto k = static_cast<Eigen::Index>(cfg_.annotators.size());
    RatingMatrix m(n, k);
    std::vector<std::string> missing;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            const auto& annotator = cfg_.annotators[static_cast<std::size_t>(j)];
            const auto rid = tasks_[static_cast<std::size_t>(i)].record_id;
            const Rating* r = find(annotator, rid, setup);
            if (!r) {
                missing.push_back("(" + annotator + ", " + std::to_string(rid) + ")");
                continue;
            }
            m(i, j) = axis == Axis::Form ? r->form : r->meaning;
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& cell : missing) list += (list.empty() ? "" : ", ") + cell;
        throw ValidationError("setup '" + setup + "' has " + std::to_string(missing.size()) +
                              " unrated (annotator, record) cell(s): " + list);
    }
    return m;
}

void Session::require_complete() const {
    std::vector<std::string> missing;
    for (const auto& a : cfg_.annotators) {
        for (const auto& t : tasks_) {
            if (!record_complete(a, t.record_id)) missing.push_back("(" + a + ", " + std::to_string(t.record_id) + ")");
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& cell : missing) list += (list.empty() ? "" : ", ") + cell;
        throw ValidationError("session incomplete; unrated (annotator, record): " + list);
    }
}

std::vector<std::pair<std::string, double>> Session::best_share(Axis axis) const {
    require_complete();
    const double denom = static_cast<double>(tasks_.size() * cfg_.annotators.size());
    std::vector<std::pair<std::string, double>> out;
    for (const auto& setup : setups_) {
        std::size_t count = 0;
        for (const auto& a : cfg_.annotators) {
            for (const auto& t : tasks_) {
                const Rating* r = find(a, t.record_id, setup);
                if (axis == Axis::Form ? r->best_form : r->best_meaning) ++count;
            }
        }
        out.emplace_back(setup, 100.0 * static_cast<double>(count) / denom);
    }
    return out;
}

std::string Session::to_json() const {
    json tasks = json::array();
    for (const auto& t : tasks_) {
        json cands = json::array();
        for (const auto& c : t.candidates) cands.push_back({{"setup", c.setup}, {"text", c.text}});
        tasks.push_back({{"record_id", t.record_id},
                         {"source_text", t.source_text},
                         {"region", t.region},
                         {"candidates", std::move(cands)},
                         {"permutation", t.permutation}});
    }
    return json{{"id", id_},
                {"corpus_digest", corpus_digest_},
                {"created_at", created_at_},
                {"n", cfg_.n},
                {"seed", cfg_.seed},
                {"annotators", cfg_.annotators},
                {"blinded", cfg_.blinded},
                {"setups", setups_},
                {"tasks", std::move(tasks)}}
        .dump(2);
}

Session Session::from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        Session s;
        s.id_ = j.at("id").get<std::string>();
        s.corpus_digest_ = j.at("corpus_digest").get<std::string>();
        s.created_at_ = j.at("created_at").get<std::string>();
        s.cfg_.n = j.at("n").get<std::size_t>();
        s.cfg_.seed = j.at("seed").get<std::uint64_t>();
        s.cfg_.annotators = j.at("annotators").get<std::vector<std::string>>();
        s.cfg_.blinded = j.at("blinded").get<bool>();
        s.setups_ = j.at("setups").get<std::vector<std::string>>();
        for (const auto& jt : j.at("tasks")) {
            AnnotationTask t;
            t.record_id = jt.at("record_id").get<std::size_t>();
            t.source_text = jt.at("source_text").get<std::string>();
            t.region = jt.at("region").get<std::string>();
            for (const auto& jc : jt.at("candidates")) {
                t.candidates.push_back({jc.at("setup").get<std::string>(), jc.at("text").get<std::string>()});
            }
            t.permutation = jt.at("permutation").get<std::vector<int>>();
            if (t.permutation.size() != t.candidates.size()) throw SchemaError("permutation length mismatch");
            s.task_index_[t.record_id] = s.tasks_.size();
            s.tasks_.push_back(std::move(t));
        }
        return s;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed session.json: ") + e.what());
    }
}

std::string rating_to_json(const Rating& r) {
    return json{{"annotator", r.annotator},     {"record_id", r.record_id}, {"setup", r.setup},
                {"form", r.form},               {"meaning", r.meaning},     {"best_form", r.best_form},
                {"best_meaning", r.best_meaning}, {"timestamp", r.timestamp}}
        .dump();
}

Rating rating_from_json(const std::string& line) {
    try {
        const json j = json::parse(line);
        Rating r;
        r.annotator = j.at("annotator").get<std::string>();
        r.record_id = j.at("record_id").get<std::size_t>();
        r.setup = j.at("setup").get<std::string>();
        r.form = j.at("form").get<int>();
        r.meaning = j.at("meaning").get<int>();
        r.best_form = j.at("best_form").get<bool>();
        r.best_meaning = j.at("best_meaning").get<bool>();
        r.timestamp = j.value("timestamp", std::string());
        return r;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed rating: ") + e.what());
    }
}

std::string format_matrix_csv(const Session& s, Axis axis, const std::string& setup) {
    const RatingMatrix m = s.export_matrix(axis, setup);
    std::vector<std::string> header{"record_id"};
    header.insert(header.end(), s.config().annotators.begin(), s.config().annotators.end());
    std::string out = csv::format_row(header);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<std::string> row{std::to_string(s.tasks()[static_cast<std::size_t>(i)].record_id)};
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(std::to_string(static_cast<int>(m(i, j))));
        out += csv::format_row(row);
    }
    return out;
}

SessionStore::SessionStore(fs::path datadir) : datadir_(std::move(datadir)) {
    fs::create_directories(datadir_);
}

SessionStore::Entry& SessionStore::open(const fs::path& dir) {
    auto entry = std::make_unique<Entry>();
    entry->session = Session::from_json(csv::read_file(dir / "session.json"));
    std::ifstream log(dir / "ratings.jsonl", std::ios::binary);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(log, line)) {
        ++lineno;
        if (line.empty()) continue;
        Rating r;
        try {
            r = rating_from_json(line);
        } catch (const SchemaError& e) {
            // A torn final line from a crash is dropped; anything else is corruption.
            if (log.peek() == std::char_traits<char>::eof()) {
                spdlog::warn("{}: dropping unreadable last rating line", (dir / "ratings.jsonl").string());
                break;
            }
            throw RowError(lineno, e.what());
        }
        entry->session.restore(r);
    }
    const std::string id = entry->session.id();
    auto& slot = sessions_[id];
    slot = std::move(entry);
    return *slot;
}

void SessionStore::load_all() {
    std::unique_lock lock(registry_mu_);
    for (const auto& d : fs::directory_iterator(datadir_)) {
        if (d.is_directory() && fs::exists(d.path() / "session.json")) {
            const auto& e = open(d.path());
            spdlog::info("loaded session {} ({} tasks)", e.session.id(), e.session.tasks().size());
        }
    }
}

std::string SessionStore::create(const Corpus& c, const std::vector<NormalizedSet>& sets, const SessionConfig& cfg,
                                 std::optional<std::string> id) {
    std::string sid = id.value_or("");
    if (sid.empty()) {
        std::random_device rd;
        sid = "s-" + sha256_hex(c.source_digest + std::to_string(rd()) + std::to_string(rd()) + now_iso8601()).substr(0, 12);
    }
    for (const unsigned char ch : sid) {
        if (!std::isalnum(ch) && ch != '-' && ch != '_') throw ValidationError("session id may use [A-Za-z0-9_-] only");
    }
    Session s = Session::create(sid, c, sets, cfg);

    std::unique_lock lock(registry_mu_);
    if (sessions_.count(sid) || fs::exists(datadir_ / sid)) throw ConflictError("session '" + sid + "' already exists");
    const fs::path dir = datadir_ / sid;
    csv::write_file_atomic(dir / "session.json", s.to_json() + "\n");
    std::ofstream(dir / "ratings.jsonl", std::ios::app);
    auto entry = std::make_unique<Entry>();
    entry->session = std::move(s);
    sessions_[sid] = std::move(entry);
    return sid;
}

void SessionStore::record(const std::string& session_id, std::vector<Rating> batch) {
    auto& entry = find(session_id);
    std::unique_lock lock(entry.mu);
    entry.session.validate(batch);
    const std::string stamp = now_iso8601();
    std::string lines;
    for (auto& r : batch) {
        if (r.timestamp.empty()) r.timestamp = stamp;
        lines += rating_to_json(r) + "\n";
    }
    {
        std::ofstream log(datadir_ / session_id / "ratings.jsonl", std::ios::binary | std::ios::app);
        log << lines;
        log.flush();
        if (!log) throw Error("cannot append to the rating log of session '" + session_id + "'");
    }
    entry.session.apply(batch);
}

SessionStore::Entry& SessionStore::find(const std::string& id) const {
    std::shared_lock lock(registry_mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw LookupError("unknown session '" + id + "'");
    return *it->second;
}

std::vector<std::string> SessionStore::ids() const {
    std::shared_lock lock(registry_mu_);
    std::vector<std::string> out;
    for (const auto& [id, e] : sessions_) out.push_back(id);
    return out;
}

}  // namespace dialnorm::annot
