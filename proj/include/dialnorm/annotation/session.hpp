#pragma once

#include "dialnorm/corpus.hpp"
#include "dialnorm/reliability.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

namespace dialnorm::annot {

enum class Axis { Form, Meaning };
std::string_view to_string(Axis a);
/// "form" or "meaning"; ValidationError otherwise.
Axis parse_axis(std::string_view token);

struct Candidate {
    std::string setup;
    std::string text;
};

struct AnnotationTask {
    std::size_t record_id = 0;
    std::string source_text;
    std::string region;
    /// Candidates in setup order.
    std::vector<Candidate> candidates;
    /// permutation[p] = index into `candidates` shown at position p.
    std::vector<int> permutation;

    const Candidate& shown(std::size_t position) const { return candidates.at(static_cast<std::size_t>(permutation.at(position))); }
};

struct Rating {
    std::string annotator;
    std::size_t record_id = 0;
    std::string setup;
    int form = 0;
    int meaning = 0;
    bool best_form = false;
    bool best_meaning = false;
    std::string timestamp;
};

/// One setup's output: record id -> normalized text (empty or absent means
/// missing).
struct NormalizedSet {
    std::string setup;
    std::map<std::size_t, std::string> texts;
};

/// Reads a normalized CSV with `id` and `normalized` columns.
NormalizedSet load_normalized_set(const std::string& setup, const std::filesystem::path& path);

struct SessionConfig {
    std::size_t n = 27;
    std::uint64_t seed = 0;
    std::vector<std::string> annotators;
    bool blinded = true;
};

/// In-memory session state: sampled tasks plus the materialized ratings
/// (latest per annotator, record and setup).
class Session {
public:
    /// Samples `cfg.n` records without replacement and shuffles each task's
    /// candidates, both seeded by cfg.seed. Throws ValidationError for n = 0,
    /// n beyond the corpus, duplicate setups or annotators, or a sampled
    /// record missing from any normalized set.
    static Session create(std::string id, const Corpus& c, const std::vector<NormalizedSet>& sets, const SessionConfig& cfg);

    const std::string& id() const noexcept { return id_; }
    const std::string& corpus_digest() const noexcept { return corpus_digest_; }
    const SessionConfig& config() const noexcept { return cfg_; }
    const std::vector<std::string>& setups() const noexcept { return setups_; }
    const std::vector<AnnotationTask>& tasks() const noexcept { return tasks_; }
    const std::string& created_at() const noexcept { return created_at_; }

    const AnnotationTask& task(std::size_t record_id) const;

    /// Checks a batch against the scores, roster, sample and the tie rule
    /// evaluated on the state after the batch. Throws without side effects.
    void validate(const std::vector<Rating>& batch) const;
    /// validate() then materialize.
    void apply(const std::vector<Rating>& batch);
    /// Materializes a rating from the log without validation.
    void restore(const Rating& r) { ratings_[{r.annotator, r.record_id, r.setup}] = r; }

    const Rating* find(const std::string& annotator, std::size_t record_id, const std::string& setup) const;

    /// Records the annotator has rated for every setup.
    std::size_t done(const std::string& annotator) const;
    bool record_complete(const std::string& annotator, std::size_t record_id) const;
    bool complete() const;
    /// First task in sample order the annotator has not finished.
    const AnnotationTask* next_task(const std::string& annotator) const;

    /// Subjects (records, sample order) x raters (roster order). Throws
    /// ValidationError naming every missing (annotator, record) cell.
    RatingMatrix export_matrix(Axis axis, const std::string& setup) const;
    /// 100 * (#best flags for the setup) / (n * k), in setup order. Ties
    /// credit every tied setup.
    std::vector<std::pair<std::string, double>> best_share(Axis axis) const;

    std::string to_json() const;
    static Session from_json(const std::string& text);

private:
    std::string id_;
    std::string corpus_digest_;
    std::string created_at_;
    SessionConfig cfg_;
    std::vector<std::string> setups_;
    std::vector<AnnotationTask> tasks_;
    std::map<std::size_t, std::size_t> task_index_;
    std::map<std::tuple<std::string, std::size_t, std::string>, Rating> ratings_;

    void require_complete() const;
};

std::string rating_to_json(const Rating& r);
Rating rating_from_json(const std::string& line);

/// Matrix CSV: header record_id,<annotators>.
std::string format_matrix_csv(const Session& s, Axis axis, const std::string& setup);

/// Sessions persisted under <datadir>/<id>/{session.json, ratings.jsonl}.
/// Ratings are appended then materialized; reopening replays the log with
/// last-write-wins. Writes are serialized per session and readers see a
/// consistent snapshot.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path datadir);

    /// Loads every session directory found under datadir.
    void load_all();

    /// ConflictError when the id exists.
    std::string create(const Corpus& c, const std::vector<NormalizedSet>& sets, const SessionConfig& cfg,
                       std::optional<std::string> id = std::nullopt);
    void record(const std::string& session_id, std::vector<Rating> batch);

    /// Runs `fn` under a shared lock. LookupError for an unknown session.
    template <typename Fn>
    auto read(const std::string& session_id, Fn&& fn) const {
        auto& entry = find(session_id);
        std::shared_lock lock(entry.mu);
        return fn(static_cast<const Session&>(entry.session));
    }

    std::vector<std::string> ids() const;
    const std::filesystem::path& datadir() const noexcept { return datadir_; }

private:
    struct Entry {
        Session session;
        mutable std::shared_mutex mu;
    };
    Entry& find(const std::string& id) const;
    Entry& open(const std::filesystem::path& dir);

    std::filesystem::path datadir_;
    mutable std::shared_mutex registry_mu_;
    std::map<std::string, std::unique_ptr<Entry>> sessions_;
};

std::string now_iso8601();

}  // namespace dialnorm::annot
