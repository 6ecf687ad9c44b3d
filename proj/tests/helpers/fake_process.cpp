// Line-oriented stand-in for external bots and annotators.
//   fake_process bot        reply "ack <n>" where n counts the request's turns
//   fake_process annotator  label every turn "Neutral", or "Questioning" on '?'
//   fake_process bogus      label every turn "NotInTaxonomy"
//   fake_process garbage    answer with a non-JSON line
//   fake_process die        exit without reading
#include <iostream>
#include <string>

#include <json.hpp>

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "bot";
  if (mode == "die") return 3;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    auto req = nlohmann::json::parse(line);
    nlohmann::json reply;
    if (mode == "bot") {
      reply["reply"] = "ack " + std::to_string(req.at("turns").size());
    } else if (mode == "annotator") {
      const std::string text = req.at("text").get<std::string>();
      reply["label"] = text.find('?') != std::string::npos ? "Questioning" : "Neutral";
      reply["confidence"] = 0.5;
    } else {
      reply["label"] = "NotInTaxonomy";
    }
    std::cout << reply.dump() << std::endl;
  }
  return 0;
}
