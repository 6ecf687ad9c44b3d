#pragma once

// Fixed dialogs shared by the prompt snapshot tests.

#include "dialeval/corpus.hpp"

namespace golden {

inline dialeval::Scenario ieval_scenario() {
  return {"golden-pos", "excited", dialeval::Polarity::Positive,
          "I am going to see my favourite band play live next month",
          "I finally got tickets to see my favourite band next month!"};
}

inline dialeval::Dialog ieval_dialog() {
  using dialeval::Role;
  dialeval::Dialog d;
  d.dialog_id = "golden-pos__ListenerBot";
  d.scenario_id = "golden-pos";
  d.bot_id = "ListenerBot";
  d.source = dialeval::Source::Synthetic;
  d.append(Role::Speaker, "I finally got tickets to see my favourite band next month!");
  d.append(Role::Listener, "That's amazing! Which band is it?");
  d.append(Role::Speaker, "It's an old rock band I have loved since high school.");
  d.append(Role::Listener, "I'm sure it will be a night to remember.");
  d.append(Role::Speaker, "I hope so, I have waited years for this.");
  d.append(Role::Listener, "Have a great time at the show!");
  return d;
}

inline dialeval::Scenario fed_scenario() {
  dialeval::Scenario s;
  s.scenario_id = "golden-open";
  s.polarity = dialeval::Polarity::Unspecified;
  s.opener_text = "Hi!";
  return s;
}

inline dialeval::Dialog fed_dialog() {
  using dialeval::Role;
  dialeval::Dialog d;
  d.dialog_id = "golden-open";
  d.scenario_id = "golden-open";
  d.bot_id = "OpenBot";
  d.append(Role::Speaker, "Hi!");
  d.append(Role::Listener, "Hello! What have you been up to today?");
  d.append(Role::Speaker, "Mostly gardening. The tomatoes are finally ripe.");
  d.append(Role::Listener, "Nice, do you grow anything else?");
  return d;
}

}  // namespace golden
