// Long-form decomposition fixture: a GPT-4o-mini answer about Blizzard
// Entertainment and the 17 atomic claims it is expected to yield.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "uekit/mock_backend.hpp"
#include "uekit/text.hpp"

namespace fixture {

inline const char* kBlizzardQuestion = "What is the gaming company \"Blizzard Entertainment\"?";

inline const std::vector<std::string>& blizzard_sentences() {
  static const std::vector<std::string> s{
      "Blizzard Entertainment is an American video game developer and publisher known for creating some of the most "
      "popular and influential games in the industry.",
      "Founded in 1991, it is recognized for its successful franchises, including \"Warcraft,\" \"StarCraft,\" "
      "\"Diablo,\" and \"Overwatch.\"",
      "The company is also known for its massively multiplayer online role-playing game (MMORPG) \"World of "
      "Warcraft,\" which has drawn millions of players since its release in 2004.",
      "Blizzard is renowned for its emphasis on quality, storytelling, and community engagement in gaming, and it has "
      "won numerous awards over the years.",
      "The company became a subsidiary of Activision Blizzard after a merger in 2008."};
  return s;
}

inline std::string blizzard_answer() { return uekit::text::join(blizzard_sentences(), " "); }

inline const std::vector<std::vector<std::string>>& blizzard_claims_by_sentence() {
  static const std::vector<std::vector<std::string>> c{
      {"Blizzard Entertainment is an American video game developer.",
       "Blizzard Entertainment is an American video game publisher.",
       "Blizzard Entertainment is known for creating some of the most popular games in the video game industry.",
       "Blizzard Entertainment is known for creating some of the most influential games in the video game industry."},
      {"Blizzard Entertainment was founded in 1991.",
       "Blizzard Entertainment is recognized for its successful franchises.",
       "Blizzard Entertainment has successful franchises including \"Warcraft.\"",
       "Blizzard Entertainment has successful franchises including \"StarCraft.\"",
       "Blizzard Entertainment has successful franchises including \"Diablo.\"",
       "Blizzard Entertainment has successful franchises including \"Overwatch.\""},
      {"Blizzard Entertainment is known for its massively multiplayer online role-playing game \"World of Warcraft.\"",
       "\"World of Warcraft\" has drawn millions of players since its release in 2004."},
      {"Blizzard Entertainment is renowned for its emphasis on quality in gaming.",
       "Blizzard Entertainment is renowned for its storytelling in gaming.",
       "Blizzard Entertainment is renowned for its community engagement in gaming.",
       "Blizzard Entertainment has won numerous awards over the years."},
      {"Blizzard Entertainment became a subsidiary of Activision Blizzard after a merger in 2008."}};
  return c;
}

inline std::vector<std::string> blizzard_claims() {
  std::vector<std::string> out;
  for (const auto& s : blizzard_claims_by_sentence()) out.insert(out.end(), s.begin(), s.end());
  return out;
}

/// Scripts both decomposition steps to return the fixed lists.
inline void script_blizzard(uekit::MockBackend& m) {
  m.on("decompose_step1", [](const uekit::BackendRequest&, int) {
    return uekit::text::format_string_list(blizzard_sentences());
  });
  m.on("decompose_step2", [](const uekit::BackendRequest& req, int) {
    const auto& text = req.task->fields.at("text");
    const auto& s = blizzard_sentences();
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] == text) return uekit::text::format_string_list(blizzard_claims_by_sentence()[i]);
    return std::string("[]");
  });
}

}  // namespace fixture
