#include "assouadlab/carpet.hpp"
#include "assouadlab/errors.hpp"
#include "assouadlab/words.hpp"

#include <algorithm>

namespace assouadlab {

namespace {

Error infeasible(std::size_t stage, const std::string& why) {
    return Error(ErrorKind::infeasible_schedule, "schedule stage " + std::to_string(stage) + ": " + why);
}

// Scale indices on the current word, pulling more base letters in until they resolve.
KScales resolve(Word& word, const RealizationStream& base, std::span<const GridShape> shapes, const Rational& R) {
    for (;;) {
        try {
            return k_scales(word, shapes, R);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::insufficient_prefix) {
                throw;
            }
        }
        std::size_t grow = std::max<std::size_t>(word.size(), 16);
        for (std::size_t k = 0; k < grow; ++k) {
            word.push_back(base.at(word.size() + 1));
        }
    }
}

void write_run(Word& word, const RealizationStream& base, std::size_t after, std::size_t run, Letter letter) {
    while (word.size() < after + run) {
        word.push_back(base.at(word.size() + 1));
    }
    std::fill(word.begin() + static_cast<std::ptrdiff_t>(after),
              word.begin() + static_cast<std::ptrdiff_t>(after + run), letter);
}

} // namespace

CarpetGoodWord good_word_carpet(const CarpetRIFS& rifs, const RealizationStream& base, Letter i, Letter j,
                                std::span<const CarpetScheduleEntry> schedule, std::size_t length) {
    const std::size_t N = rifs.alphabet_size();
    if (i < 1 || i > N || j < 1 || j > N) {
        throw invalid_input("letters i, j must lie in 1.." + std::to_string(N));
    }
    if (base.max_letter() > N) {
        throw invalid_input("base stream emits letter " + std::to_string(base.max_letter()) + " outside 1.." +
                            std::to_string(N));
    }
    const auto shapes = rifs.shapes();
    CarpetGoodWord out;
    out.word = base.prefix(length);
    std::size_t reserved = 0; // positions <= reserved hold earlier runs
    for (std::size_t l = 0; l < schedule.size(); ++l) {
        const auto& entry = schedule[l];
        const std::size_t stage = l + 1;
        if (entry.R <= 0 || entry.R >= 1) {
            throw infeasible(stage, "R must lie in (0,1)");
        }
        if (entry.run == 0) {
            throw infeasible(stage, "run length must be positive");
        }
        if (l > 0 && !(entry.R < schedule[l - 1].R)) {
            throw infeasible(stage, "R values must be strictly decreasing");
        }
        if (l > 0 && entry.run < schedule[l - 1].run) {
            throw infeasible(stage, "run lengths must be non-decreasing");
        }
        KScales before = resolve(out.word, base, shapes, entry.R);
        if (before.k1 < reserved) {
            throw infeasible(stage, "j-run after k1 = " + std::to_string(before.k1) +
                                        " would overwrite an earlier run ending at " + std::to_string(reserved));
        }
        write_run(out.word, base, before.k1, entry.run, j);
        KScales after = resolve(out.word, base, shapes, entry.R);
        if (after.k1 != before.k1) {
            throw infeasible(stage, "k1 moved after writing the j-run");
        }
        if (entry.run > after.k2 - after.k1) {
            throw infeasible(stage, "run " + std::to_string(entry.run) + " exceeds k2 - k1 = " +
                                        std::to_string(after.k2 - after.k1));
        }
        write_run(out.word, base, after.k2, entry.run, i);
        reserved = after.k2 + entry.run;
        out.stages.push_back({entry.R, entry.run, after.k1, after.k2});
    }
    while (out.word.size() < length) {
        out.word.push_back(base.at(out.word.size() + 1));
    }
    return out;
}

} // namespace assouadlab
