#include "kumpul/collect/synthetic.hpp"

#include <array>
#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "kumpul/core/error.hpp"
#include "kumpul/core/fields.hpp"
#include "kumpul/core/paths.hpp"
#include "kumpul/core/text.hpp"
#include "kumpul/langid/langid.hpp"
#include "kumpul/relevancy/relevancy.hpp"

namespace kumpul::collect {

namespace {

// Every opener carries at least three context tokens.
constexpr std::array kKeepOpeners = {
    "Kebijakan harga BBM yang baru",
    "Harga BBM dan ongkos angkot naik bersamaan",
    "Kenaikan harga BBM terasa dalam kehidupan sehari-hari",
    "Kebijakan BBM dan dampaknya mulai terasa",
    "Dampaknya terhadap harga kebutuhan pokok sangat besar",
    "Harga BBM subsidi naik dan warga mengeluh",
    "Kebijakan pemerintah soal harga BBM",
    "Dampak kenaikan harga BBM terhadap nelayan",
    "Kebijakan harga BBM dinilai memberatkan rakyat",
    "Sejak harga BBM naik, kehidupan sehari-hari makin sulit",
    "Harga pertalite dan solar naik, BBM makin mahal",
    "Antrean BBM panjang setelah kebijakan harga baru",
    "Kebijakan kenaikan harga BBM menuai protes",
    "Harga BBM naik lagi dan dampaknya terasa",
    "Pengaruh kebijakan BBM terhadap kehidupan warga",
    "Harga BBM naik, biaya hidup sehari-hari ikut naik",
};

constexpr std::array kKeepMiddles = {
    "warga di kampung kami mulai mengurangi belanja",
    "para sopir angkot terpaksa menaikkan tarif",
    "ibu-ibu di pasar mengeluhkan harga sayur",
    "nelayan di pesisir tidak bisa melaut",
    "pedagang kecil menaikkan harga gorengan",
    "mahasiswa berdemo di depan gedung dewan",
    "pengemudi ojek daring menuntut tarif baru",
    "petani kesulitan membeli pupuk dan benih",
    "buruh pabrik meminta kenaikan upah",
    "pemilik warung mengurangi porsi makanan",
    "ongkos kirim barang ke desa ikut naik",
    "biaya sekolah anak terasa makin berat",
    "penghasilan keluarga kami tidak bertambah",
    "tarif bus antarkota naik cukup tinggi",
    "pengusaha kecil harus memutar otak",
    "para guru honorer makin kesulitan",
    "antrean di pom bensin mengular sejak subuh",
    "warga beralih naik sepeda ke kantor",
    "pedagang sayur keliling mengurangi rute",
    "ibu rumah tangga harus berhemat",
    "sopir truk mengeluhkan biaya solar",
    "tetangga saya menjual motornya",
    "bantuan sosial belum sampai ke rumah kami",
    "pemerintah daerah belum memberi penjelasan",
};

constexpr std::array kKeepClosers = {
    "semoga pemerintah segera memberi solusi.",
    "kami berharap ada bantuan langsung tunai.",
    "rakyat kecil yang paling merasakan akibatnya.",
    "ongkos transportasi jadi mahal sekali.",
    "kondisi ekonomi keluarga makin buruk.",
    "subsidi harus tepat sasaran.",
    "uang belanja tidak cukup lagi.",
    "semua serba mahal sekarang.",
    "kami hanya bisa pasrah.",
    "pemerintah harus mendengar suara rakyat.",
    "mudah-mudahan keadaan segera membaik.",
    "banyak warga merasa kecewa.",
    "pelayanan angkutan umum harus tetap bagus.",
    "kebutuhan pokok semakin sulit dijangkau.",
    "kami menunggu keputusan yang lebih adil.",
    "tolong perhatikan nasib rakyat kecil.",
    "gaji tidak naik tetapi pengeluaran terus bertambah.",
    "keluarga kami harus mengencangkan ikat pinggang.",
    "semoga ada kebijakan yang lebih bijak.",
    "kami tetap berusaha bertahan.",
};

constexpr std::array kPoisonOpeners = {
    "Promo BlackBerry Messenger terbaru",
    "Jual akun BlackBerry Messenger murah",
    "Yuk gabung grup BlackBerry Messenger kami",
    "Undangan BlackBerry Messenger untuk reuni sekolah",
    "Info lowongan kerja lewat BlackBerry Messenger",
    "Kangen zaman BlackBerry Messenger dulu",
    "Aplikasi BlackBerry Messenger resmi ditutup",
    "Masih ada yang pakai BlackBerry Messenger",
    "Tukar pin BBM di BlackBerry Messenger",
    "Grup alumni pindah dari BlackBerry Messenger",
};

constexpr std::array kPoisonMiddles = {
    "tambahkan pin BBM saya",
    "silakan kirim pesan ke admin",
    "banyak teman lama bisa ditemukan",
    "stok terbatas untuk pembeli pertama",
    "obrolan grup jadi ramai lagi",
    "kenangan masa sekolah muncul kembali",
    "pengumuman akan dibagikan malam ini",
    "tanya jawab dibuka untuk umum",
    "kontak lama masih tersimpan",
    "diskon khusus untuk anggota baru",
};

constexpr std::array kPoisonClosers = {
    "jangan sampai ketinggalan.",
    "ditunggu kabarnya.",
    "terima kasih atas perhatiannya.",
    "salam hangat untuk semua.",
    "hubungi kami segera.",
    "semoga bermanfaat.",
    "sampai jumpa di grup.",
    "cepat daftar sebelum penuh.",
};

// Token-disjoint from the synthetic context.
constexpr std::array kOffTopicOpeners = {
    "Tim sepak bola kampung kami menang telak",
    "Resep rendang padang ini gampang dibuat",
    "Cuaca cerah sepanjang pagi",
    "Konser musik di alun-alun ramai penonton",
    "Kucing tetangga melahirkan empat anak",
    "Film horor terbaru tayang di bioskop",
    "Pameran lukisan dibuka di gedung kesenian",
    "Lomba lari pagi diikuti ratusan peserta",
    "Taman kota baru selesai dipercantik",
    "Perpustakaan sekolah menambah koleksi buku",
    "Pertandingan bulu tangkis berlangsung seru",
    "Festival kuliner digelar di pusat kota",
    "Pantai di selatan kota sedang ramai",
    "Kebun bunga di lereng gunung mekar indah",
};

constexpr std::array kOffTopicMiddles = {
    "anak-anak bermain layang-layang di lapangan",
    "para penonton bersorak gembira",
    "adik saya belajar memasak bersama nenek",
    "teman sekelas mengajak berfoto bersama",
    "panitia menyiapkan panggung sejak subuh",
    "rombongan wisatawan datang dari luar pulau",
    "kakak saya membeli buku cerita baru",
    "warga berkumpul sambil menikmati kopi",
    "guru mengajak murid berkunjung ke museum",
    "penjual es kelapa kewalahan melayani pembeli",
    "pemain muda tampil sangat percaya diri",
    "keluarga kami berlibur ke rumah nenek",
};

constexpr std::array kOffTopicClosers = {
    "suasananya sangat menyenangkan.",
    "semua orang tampak bahagia.",
    "pengalaman yang tidak terlupakan.",
    "sampai jumpa tahun depan.",
    "pemandangannya indah sekali.",
    "rasanya enak sekali.",
    "acara berjalan lancar.",
    "kami pulang dengan senang.",
    "foto-fotonya bagus sekali.",
    "semoga acara serupa digelar lagi.",
};

constexpr std::array kTimes = {
    "",
    "sejak minggu lalu",
    "pagi ini",
    "bulan ini",
    "sejak awal september",
    "menjelang akhir bulan",
    "tadi malam",
    "beberapa pekan terakhir",
    "setiap minggu",
    "sekarang",
    "kemarin sore",
    "sejak kemarin",
};

constexpr std::size_t kAuthors = 300;
constexpr int kMaxDraws = 10000;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n) by rejection, independent of the standard
    /// library's distribution implementations.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
        std::uint64_t x = 0;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    template <typename Array>
    const char* pick(const Array& a) {
        return a[below(a.size())];
    }

private:
    std::mt19937_64 engine_;
};

template <typename O, typename M, typename C>
std::string compose(Rng& rng, const O& openers, const M& middles, const C& closers) {
    std::string s = rng.pick(openers);
    s += ", ";
    s += rng.pick(middles);
    const std::string when = rng.pick(kTimes);
    if (!when.empty()) {
        s += " " + when;
    }
    s += ", ";
    s += rng.pick(closers);
    return s;
}

std::size_t count_of(double fraction, std::size_t total) {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
}

} // namespace

std::string_view to_string(Label l) noexcept {
    switch (l) {
    case Label::keep: return "keep";
    case Label::duplicate: return "duplicate";
    case Label::non_target_language: return "non_target_language";
    case Label::keyword_excluded: return "keyword_excluded";
    case Label::irrelevant: return "irrelevant";
    }
    return "keep";
}

std::optional<Label> parse_label(std::string_view s) noexcept {
    for (auto l : {Label::keep, Label::duplicate, Label::non_target_language, Label::keyword_excluded,
                   Label::irrelevant}) {
        if (to_string(l) == s) {
            return l;
        }
    }
    return std::nullopt;
}

std::map<Label, std::size_t> SyntheticManifest::label_counts() const {
    std::map<Label, std::size_t> c;
    if (counts) {
        c = *counts;
        c.erase(Label::keep);
    } else {
        const std::array<std::pair<const char*, double>, 4> fractions = {{
            {"duplicate_fraction", duplicate_fraction},
            {"non_target_language_fraction", non_target_language_fraction},
            {"keyword_excluded_fraction", keyword_excluded_fraction},
            {"irrelevant_fraction", irrelevant_fraction},
        }};
        for (const auto& [name, f] : fractions) {
            if (!(f >= 0.0 && f <= 1.0)) {
                throw_validation(name, "must lie in [0, 1]");
            }
        }
        if (duplicate_fraction + non_target_language_fraction + keyword_excluded_fraction + irrelevant_fraction >
            1.0 + 1e-9) {
            throw_validation("fractions", "noise fractions must sum to at most 1");
        }
        c[Label::duplicate] = count_of(duplicate_fraction, total);
        c[Label::non_target_language] = count_of(non_target_language_fraction, total);
        c[Label::keyword_excluded] = count_of(keyword_excluded_fraction, total);
        c[Label::irrelevant] = count_of(irrelevant_fraction, total);
    }
    for (auto l : {Label::duplicate, Label::non_target_language, Label::keyword_excluded, Label::irrelevant}) {
        c.try_emplace(l, 0);
    }
    std::size_t noise = 0;
    for (const auto& [_, n] : c) {
        noise += n;
    }
    if (noise > total) {
        throw_validation("counts", fmt::format("noise records ({}) exceed total ({})", noise, total));
    }
    c[Label::keep] = total - noise;
    if (c[Label::duplicate] > 0 && c[Label::duplicate] == total) {
        throw_validation("duplicate_fraction", "duplicates need at least one original record to copy");
    }
    return c;
}

SyntheticManifest synthetic_manifest_from_json(const Json& j) {
    FieldErrors errors;
    SyntheticManifest m;
    ObjectReader r(j, "", errors);
    if (r.ok()) {
        r.allow_only({"total", "seed", "source_name", "duplicate_fraction", "non_target_language_fraction",
                      "keyword_excluded_fraction", "irrelevant_fraction", "counts"});
        if (auto t = r.integer("total", true)) {
            if (*t < 0) errors.add("total", "must be non-negative");
            else m.total = static_cast<std::size_t>(*t);
        }
        if (auto s = r.integer("seed")) {
            m.seed = static_cast<std::uint64_t>(*s);
        }
        if (auto s = r.string("source_name")) m.source_name = *s;
        auto fraction = [&](const char* key, double& out) {
            if (auto f = r.number(key)) {
                if (!(*f >= 0.0 && *f <= 1.0)) errors.add(key, "must lie in [0, 1]");
                else out = *f;
            }
        };
        fraction("duplicate_fraction", m.duplicate_fraction);
        fraction("non_target_language_fraction", m.non_target_language_fraction);
        fraction("keyword_excluded_fraction", m.keyword_excluded_fraction);
        fraction("irrelevant_fraction", m.irrelevant_fraction);
        if (auto c = r.raw("counts")) {
            ObjectReader cr(*c, "counts", errors);
            if (cr.ok()) {
                cr.allow_only({"duplicate", "non_target_language", "keyword_excluded", "irrelevant"});
                std::map<Label, std::size_t> counts;
                for (auto l : {Label::duplicate, Label::non_target_language, Label::keyword_excluded,
                               Label::irrelevant}) {
                    const std::string key(to_string(l));
                    if (auto n = cr.integer(key.c_str())) {
                        if (*n < 0) errors.add("counts." + key, "must be non-negative");
                        else counts[l] = static_cast<std::size_t>(*n);
                    }
                }
                m.counts = counts;
            }
        }
    }
    errors.raise_if_any("invalid synthetic manifest");
    m.label_counts();
    return m;
}

Json to_json(const SyntheticManifest& m) {
    Json j = {{"total", m.total}, {"seed", m.seed}, {"source_name", m.source_name}};
    if (m.counts) {
        Json c = Json::object();
        for (const auto& [l, n] : *m.counts) {
            c[std::string(to_string(l))] = n;
        }
        j["counts"] = c;
    } else {
        j["duplicate_fraction"] = m.duplicate_fraction;
        j["non_target_language_fraction"] = m.non_target_language_fraction;
        j["keyword_excluded_fraction"] = m.keyword_excluded_fraction;
        j["irrelevant_fraction"] = m.irrelevant_fraction;
    }
    return j;
}

std::map<Label, std::size_t> SyntheticCorpus::counts() const {
    std::map<Label, std::size_t> c;
    for (auto l : {Label::keep, Label::duplicate, Label::non_target_language, Label::keyword_excluded,
                   Label::irrelevant}) {
        c[l] = 0;
    }
    for (auto l : labels) {
        ++c[l];
    }
    return c;
}

SyntheticCorpus generate_synthetic(const SyntheticManifest& manifest, const std::vector<std::string>& english_pool,
                                   const std::vector<langid::LanguageProfile>& profiles) {
    const auto counts = manifest.label_counts();
    Rng rng(manifest.seed);

    std::vector<Label> originals;
    for (auto l : {Label::keep, Label::non_target_language, Label::keyword_excluded, Label::irrelevant}) {
        originals.insert(originals.end(), counts.at(l), l);
    }
    rng.shuffle(originals);

    if (counts.at(Label::non_target_language) > 0 && english_pool.empty()) {
        throw Error(ErrorCode::validation, "the English seed corpus is empty");
    }
    std::vector<std::size_t> english_order(english_pool.size());
    for (std::size_t i = 0; i < english_order.size(); ++i) english_order[i] = i;
    rng.shuffle(english_order);
    std::size_t english_next = 0;

    std::set<std::string> seen;
    const auto start = to_seconds(*parse_rfc3339(kSyntheticWindowStart));
    const auto end = to_seconds(*parse_rfc3339(kSyntheticWindowEnd));
    const auto window = static_cast<std::uint64_t>((end - start).count()) + 1;

    auto detected_as_id = [&](const std::string& text) {
        return langid::detect(text, profiles).language == "id";
    };

    auto unique_text = [&](auto make, bool indonesian) {
        for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
            std::string text = make();
            if (text.empty()) {
                continue;
            }
            std::string canonical = normalize_text(text);
            if (seen.contains(canonical) || (!profiles.empty() && detected_as_id(text) != indonesian)) {
                continue;
            }
            seen.insert(std::move(canonical));
            return text;
        }
        throw Error(ErrorCode::validation, "synthetic text pool exhausted; lower the record count");
    };

    auto english_text = [&]() -> std::string {
        const std::size_t n = english_order.size();
        const std::size_t k = english_next++;
        if (k < n) {
            return english_pool[english_order[k]];
        }
        // Pool exhausted: pair sentences to keep drawing fresh texts.
        const std::size_t a = english_order[rng.below(n)];
        const std::size_t b = english_order[rng.below(n)];
        return a == b ? std::string{} : english_pool[a] + " " + english_pool[b];
    };

    auto make_text = [&](Label label) -> std::string {
        switch (label) {
        case Label::keep:
            return unique_text([&] {
                auto s = compose(rng, kKeepOpeners, kKeepMiddles, kKeepClosers);
                return relevancy::baseline_score(kSyntheticContext, s) >= 0.12 ? s : std::string{};
            }, true);
        case Label::non_target_language:
            return unique_text(english_text, false);
        case Label::keyword_excluded:
            return unique_text([&] { return compose(rng, kPoisonOpeners, kPoisonMiddles, kPoisonClosers); }, true);
        case Label::irrelevant:
            return unique_text([&] {
                auto s = compose(rng, kOffTopicOpeners, kOffTopicMiddles, kOffTopicClosers);
                return relevancy::baseline_score(kSyntheticContext, s) == 0.0 ? s : std::string{};
            }, true);
        case Label::duplicate:
            break;
        }
        return {};
    };

    SyntheticCorpus corpus;
    std::vector<std::size_t> original_positions;
    std::size_t remaining_originals = originals.size();
    std::size_t remaining_duplicates = counts.at(Label::duplicate);
    std::size_t next_original = 0;
    while (remaining_originals + remaining_duplicates > 0) {
        const bool emit_original =
            original_positions.empty() || remaining_duplicates == 0 ||
            (remaining_originals > 0 && rng.below(remaining_originals + remaining_duplicates) < remaining_originals);
        Record r;
        Label label = Label::duplicate;
        if (emit_original) {
            label = originals[next_original++];
            --remaining_originals;
            r.source = manifest.source_name;
            r.source_category = SourceCategory::social_media;
            r.text = make_text(label);
            r.url = fmt::format("https://example.org/synthetic/{}/{}", manifest.seed, original_positions.size() + 1);
            r.author = fmt::format("akun{:03}", rng.below(kAuthors));
            r.published_at = start + std::chrono::seconds{static_cast<long long>(rng.below(window))};
            r.collected_at = end + std::chrono::seconds{1};
            original_positions.push_back(corpus.records.size());
        } else {
            --remaining_duplicates;
            r = corpus.records[original_positions[rng.below(original_positions.size())]];
        }
        r.record_id = fmt::format("syn-{:06}", corpus.records.size() + 1);
        r.extras = {{"label", std::string(to_string(label))}};
        corpus.records.push_back(std::move(r));
        corpus.labels.push_back(label);
    }
    return corpus;
}

SyntheticCorpus generate_synthetic(const SyntheticManifest& manifest) {
    return generate_synthetic(manifest, langid::read_lines(data_dir() / "seeds" / "en.txt"),
                              langid::load_profiles(data_dir() / "profiles"));
}

} // namespace kumpul::collect
