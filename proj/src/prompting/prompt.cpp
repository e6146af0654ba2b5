#include "dialnorm/prompting/prompt.hpp"

#include "dialnorm/error.hpp"

namespace dialnorm::prompt {

namespace {

constexpr std::string_view kInstruction =
    "Given a Greek sentence from <place>. Translate it to standard Greek. Keep the same style, do not make it "
    "more official. Use words with the same etymology if and only if they exist in standard Greek, otherwise "
    "use different words. Show just the translation and nothing else.";

constexpr std::string_view kNorthern = R"(Given a Greek sentence from <place>. Translate it to standard Greek. Keep the same style, do not make it more official. Use words with the same etymology if and only if they exist in standard Greek, otherwise use different words. Show just the translation and nothing else.

            For example:

            <place>:
            Γίδα ψουριάρα, νουρά κουρδουμέν'

            Standard Greek:
            Γίδα ψωριάρα, ουρά κορδωμένη

            <place>:
            Μι πήρι, σι πήρι, τουν πήρι του πουτάμ'

            Standard Greek:
            Με πήρε, σε πήρε, τον πήρε το ποτάμι

            <place>:
            Τ' γάμσι του κέρατου

            Standard Greek:
            Του γάμησε το κέρατο

            <place>:
            <text>

            Standard Greek:)";

constexpr std::string_view kSouthern = R"(Given a Greek sentence from <place>. Translate it to standard Greek. Keep the same style, do not make it more official. Use words with the same etymology if and only if they exist in standard Greek, otherwise use different words. Show just the translation and nothing else.

For example:

<place>:
Καλλιά 'ν' το διακονίκι, παρά το βασιλίκι

Standard Greek:
Καλύτερα είναι το διακονίκι, παρά το βασιλίκι

<place>:
Τάχει η γραι στο λοϊσμό τζη τα θωρεί και στο όνειρό τζη

Standard Greek:
Τά 'χει η γρια στον λογισμό της τα βλέπει και στο όνειρό της

<place>:
Των βρενίμων τα παιδκιά πριν πεινασουν μαειρεύκουν

Standard Greek:
Των φρονίμων τα παιδιά πριν πεινάσουν μαγειρεύουν

<place>:
<proverb>

Standard Greek:)";

constexpr std::string_view kPontic = R"(Given a Greek sentence from Πόντος. Translate it to standard Greek. Keep the same style, do not make it more official. Use words with the same etymology if and only if they exist in standard Greek, otherwise use different words. Show just the translation and nothing else.

For example:

Πόντος:
Ποιος βάλλ' το χέρ΄ν ατ' 'ς σο μέλ' και 'κι λείχ' τα δάχτυλα 'τ'

Standard Greek:
Ποιος βάζει το χέρι του στο μέλι και δεν γλείφει τα δάχτυλά του

Πόντος:
Κι'αν παθάνης κι μαθάνεις

Standard Greek:
Αν δεν παθαίνεις δεν μαθαίνεις

Πόντος:
Ο νέον θολόν ποτάμιν είναι!

Standard Greek:
Ο νέος θολό ποτάμι είναι!

Πόντος:
<proverb>

Standard Greek:)";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

/// Fills the input placeholder last and exactly once so text containing
/// "<place>" is left untouched.
std::string fill_template(std::string_view tmpl, std::string_view place, std::string_view text) {
    std::string out(tmpl);
    std::size_t pos = std::string::npos;
    std::string_view hole;
    for (const auto ph : kTextPlaceholders) {
        if (const auto p = out.find(ph); p != std::string::npos) {
            pos = p;
            hole = ph;
            break;
        }
    }
    std::string head = out.substr(0, pos);
    std::string tail = out.substr(pos + hole.size());
    replace_all(head, kPlacePlaceholder, place);
    replace_all(tail, kPlacePlaceholder, place);
    return head + std::string(text) + tail;
}

}  // namespace

std::string_view to_string(ShotMode m) {
    return m == ShotMode::ThreeShot ? "three" : "nine";
}

ShotMode parse_shot_mode(std::string_view token) {
    if (token == "three" || token == "3") return ShotMode::ThreeShot;
    if (token == "nine" || token == "9") return ShotMode::NineShot;
    throw ConfigError("unknown shot mode '" + std::string(token) + "' (expected three or nine)");
}

const std::vector<Shot>& shot_bank(DialectGroup g) {
    static const std::vector<Shot> northern{
        {"Γίδα ψουριάρα, νουρά κουρδουμέν'", "Γίδα ψωριάρα, ουρά κορδωμένη", DialectGroup::Northern},
        {"Μι πήρι, σι πήρι, τουν πήρι του πουτάμ'", "Με πήρε, σε πήρε, τον πήρε το ποτάμι", DialectGroup::Northern},
        {"Τ' γάμσι του κέρατου", "Του γάμησε το κέρατο", DialectGroup::Northern},
    };
    static const std::vector<Shot> southern{
        {"Καλλιά 'ν' το διακονίκι, παρά το βασιλίκι", "Καλύτερα είναι το διακονίκι, παρά το βασιλίκι",
         DialectGroup::Southern},
        {"Τάχει η γραι στο λοϊσμό τζη τα θωρεί και στο όνειρό τζη",
         "Τά 'χει η γρια στον λογισμό της τα βλέπει και στο όνειρό της", DialectGroup::Southern},
        {"Των βρενίμων τα παιδκιά πριν πεινασουν μαειρεύκουν", "Των φρονίμων τα παιδιά πριν πεινάσουν μαγειρεύουν",
         DialectGroup::Southern},
    };
    static const std::vector<Shot> pontic{
        {"Ποιος βάλλ' το χέρ΄ν ατ' 'ς σο μέλ' και 'κι λείχ' τα δάχτυλα 'τ'",
         "Ποιος βάζει το χέρι του στο μέλι και δεν γλείφει τα δάχτυλά του", DialectGroup::Pontic},
        {"Κι'αν παθάνης κι μαθάνεις", "Αν δεν παθαίνεις δεν μαθαίνεις", DialectGroup::Pontic},
        {"Ο νέον θολόν ποτάμιν είναι!", "Ο νέος θολό ποτάμι είναι!", DialectGroup::Pontic},
    };
    switch (g) {
        case DialectGroup::Northern: return northern;
        case DialectGroup::Southern: return southern;
        case DialectGroup::Pontic: return pontic;
    }
    throw ConfigError("unknown dialect group");
}

std::string_view template_text(DialectGroup g) {
    switch (g) {
        case DialectGroup::Northern: return kNorthern;
        case DialectGroup::Southern: return kSouthern;
        case DialectGroup::Pontic: return kPontic;
    }
    throw ConfigError("unknown dialect group");
}

std::string build_prompt(const Region& region, std::string_view text, ShotMode mode) {
    if (text.empty()) throw ValidationError("cannot build a prompt for empty text");
    if (mode == ShotMode::ThreeShot) {
        const DialectGroup g = group_for_region(region);
        return fill_template(template_text(g), g == DialectGroup::Pontic ? kPonticPlace : std::string_view(region.name), text);
    }

    std::string tmpl(kInstruction);
    tmpl += "\n\nFor example:\n\n";
    for (const auto g : kAllGroups) {
        const std::string_view label = g == DialectGroup::Pontic ? kPonticPlace : kPlacePlaceholder;
        for (const auto& shot : shot_bank(g)) {
            tmpl.append(label).append(":\n").append(shot.source).append("\n\nStandard Greek:\n");
            tmpl.append(shot.target).append("\n\n");
        }
    }
    tmpl += "<place>:\n<text>\n\nStandard Greek:";
    return fill_template(tmpl, region.name, text);
}

}  // namespace dialnorm::prompt
