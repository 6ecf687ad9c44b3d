// Built-in scales, instruction texts and demonstration dialogs.
// Turn texts are kept verbatim, typos included.

#include <initializer_list>

#include "dialeval/promptkit.hpp"

namespace dialeval {

namespace {

Demonstration demo(std::string id, std::string label, Polarity polarity,
                   std::initializer_list<const char*> turns) {
  Demonstration d;
  d.dialog.dialog_id = std::move(id);
  d.dialog.source = Source::Human;
  Role role = Role::Speaker;
  for (const char* t : turns) {
    d.dialog.append(role, t);
    role = role == Role::Speaker ? Role::Listener : Role::Speaker;
  }
  d.label = std::move(label);
  d.polarity = polarity;
  return d;
}

DemoBank ieval_demos() {
  DemoBank b{"ieval", "ieval-3", {}};
  const auto pos = Polarity::Positive;
  const auto neg = Polarity::Negative;

  b.demos.push_back(demo(
      "demo-ieval-positive-bad", "Bad", pos,
      {"I had a pretty large loan, with a bit of a high interest rate, and a high monthly "
       "payment. My mother decided to pay it off for me, out of the blue!",
       "that is a shame. how long have you had to do? that sounds like you have a good "
       "relationship with your mom?",
       "I have been paying off this loan for several months. I have such a good relationship "
       "with my mother that she relieved me of this debt much to my surprise.",
       "that sounds like a great thing to hear",
       "Yes, I am very happy to not have to make monthly payments to pay off this high "
       "interest rate loan anymore.",
       "that is a good feeling. i am sure you will get the job!"}));
  b.demos.push_back(demo(
      "demo-ieval-positive-okay", "Okay", pos,
      {"My son drove down and spent the whole weekend helping me move.",
       "That's great! How old is he?",
       "He's going to be turning 30 this year. He's such a sweet son.",
       "That's awesome. I'm happy for him.",
       "Thank you. Moving is such a pain, it's always  nice to have help.",
       "hat's great. I'm happy for you."}));
  b.demos.push_back(demo(
      "demo-ieval-positive-good", "Good", pos,
      {"I am going on a vacation this Thursday! I am very excited!",
       "that's awesome! where are you going? i'm sure you'll have a great time!",
       "Thanks, we're going to see the Grand Canyon.",
       "that sounds like a lot of fun! i've never been there, but i hear it's beautiful.",
       "Me too!",
       "i'd love to go on a cruise one day. i hope you have a wonderful time!"}));

  b.demos.push_back(demo(
      "demo-ieval-negative-bad", "Bad", neg,
      {"I was one percent off from passing my math test, I was devastated.",
       "i'm sorry to hear that. were you able to get a better grade on the test?",
       "No, I am just upset.",
       "i think i am going to go back to school. i am not sure what i will do.",
       "Make sure to study.",
       "i am sure you will do great. i hope you get a good grade on your test. good luck!"}));
  b.demos.push_back(demo(
      "demo-ieval-negative-okay", "Okay", neg,
      {"I was recently on a long international flight and we hit some really bad turbulence.",
       "Oh no, what happened?",
       "The flight attendants weren't able to do much for us, unfortunately.",
       "Oh no, what happened?",
       "You don't have to repeat yourself. We had turbulence on the flight and the attendants "
       "didn't help us.",
       "That's awful. I'm glad you were okay."}));
  b.demos.push_back(demo(
      "demo-ieval-negative-good", "Good", neg,
      {"I was out walking by the lake over the weekend and there shore was just covered in "
       "dead rotting fish.",
       "Oh no! Are you ok?",
       "Yes, I'm okay. It was just weird to see so many dead fish",
       "I bet that was scary.",
       "Yes, I would definitely not want to encounter that experience again.",
       "That sounds like a scary experience. I'm glad you are ok."}));
  return b;
}

DemoBank fed_demos() {
  DemoBank b{"fed", "fed-5", {}};
  const auto none = Polarity::Unspecified;
  b.demos.push_back(demo("demo-fed-very-bad", "Very bad", none,
                         {"Hi!", "Hi there.", "I want a recommendation for a holiday destination",
                          "Have you tried asking your friends what they like?",
                          "I have, but I'm looking for your point of view",
                          "What was the reply? Have you tried looking in a newspaper article?",
                          "Sorry? I said I want your point of view",
                          "It's OK. After all, you are only human. My opinion is of no consequence.",
                          "Yours is the opinion I want"}));
  b.demos.push_back(demo(
      "demo-fed-bad", "Bad", none,
      {"Hi!", "Hi there.",
       "I'm trying to figure out what to make for this weekend's party. Any suggestions?",
       "Don't think too hard. I'm sure I can smell sawdust. First you must download me to your "
       "personal computer.",
       "I must do what the what now?", "Right now?Why do you have to do it?",
       "Hey, your spacing is off.", "You've got my full attention. off was not my intention.",
       "And your capitalization!"}));
  b.demos.push_back(demo("demo-fed-neutral", "Neutral", none,
                         {"Hi!", "Hi! How are you today?", "What's laser tag?",
                          "Like paintball, but with lasers!", "lol good description",
                          "Do you know what paintball is?", "yeah I played it before",
                          "Cool! What did you think?", "It's somewhat exciting, but very tiring :)",
                          "That is very true. What is your favorite color?", "I like red"}));
  b.demos.push_back(demo(
      "demo-fed-good", "Good", none,
      {"Hi!", "What is your favorite holiday?",
       "one where I get to meet lots of different people.",
       "What was the most number of people you have ever met during a holiday?",
       "Hard to keep a count. Maybe 25.", "Which holiday was that?", "I think it was Australia",
       "Do you still talk to the people you met?",
       "Not really. The interactions are usually short-lived but it's fascinating to learn "
       "where people are coming from and what matters to them"}));
  b.demos.push_back(demo(
      "demo-fed-very-good", "Very good", none,
      {"Hi!", "Hi! How's it going?", "Good! How are you?", "I'm well, thanks! How was your day?",
       "My day was fine, I just went to work today. How was your day?",
       "My day was fine. I've been procrastinating on finishing my homework, but it's due in a "
       "few weeks, so I'll get it done eventually. I've watched a bunch of anime today. Where do "
       "you work?",
       "I work at a large tech company", "Cool! What do you do for the company?",
       "I work on machine learning research"}));
  return b;
}

InstructionBank ieval_instructions() {
  InstructionBank b;
  b.id = "ieval";
  b.entries[Polarity::Positive] =
      "In positive contexts, like this one, good empathetic listeners always respond politely "
      "and demonstrate attention. More importantly, they try to amplify speaker's positive "
      "emotion by asking follow-up questions and sharing their appraisal of the situation. On "
      "the contrary, bad empathetic listeners repeat themselves too much and don't follow the "
      "context.";
  b.entries[Polarity::Negative] =
      "In negative contexts, like this one, good empathetic listeners always respond politely "
      "and demonstrate attention. More importantly, they try to clarify the context and the "
      "consequences for the speaker and alleviate speaker's negative emotion by sympathizing and "
      "suggesting solutions. On the contrary, bad empathetic listeners ignore speaker's emotion, "
      "ask inappropriate questions, repeat themselves too much and focus on self instead of the "
      "speaker.";
  return b;
}

InstructionBank fed_instructions() {
  InstructionBank b;
  b.id = "fed";
  b.entries[Polarity::Unspecified] =
      "In such open-ended dialogs, good listeners demonstrate coherence and maintain a good "
      "conversation flow, they display a likeable personality and understanding of the speaker. "
      "On the contrary, bad listeners don’t follow the context and don’t show much "
      "interest in the conversation.";
  return b;
}

}  // namespace

const Banks& builtin_banks() {
  static const Banks banks = [] {
    Banks b;
    b.scales.emplace(ieval_scale().name(), ieval_scale());
    b.scales.emplace(fed_scale().name(), fed_scale());
    b.demo_banks.emplace("ieval", ieval_demos());
    b.demo_banks.emplace("fed", fed_demos());
    b.instruction_banks.emplace("ieval", ieval_instructions());
    b.instruction_banks.emplace("fed", fed_instructions());
    return b;
  }();
  return banks;
}

}  // namespace dialeval
