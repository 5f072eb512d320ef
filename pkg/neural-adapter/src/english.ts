/**
 * Tiny English text sample used by the NL pre-training strategies as a
 * stand-in for a large natural-language corpus.
 */

export const ENGLISH_SAMPLE: string[] = [
  "the quick brown fox jumps over the lazy dog",
  "a journey of a thousand miles begins with a single step",
  "all that glitters is not gold",
  "time and tide wait for no one",
  "actions speak louder than words",
  "practice makes perfect in the long run",
  "the early bird catches the worm",
  "a watched pot never boils",
  "many hands make light work",
  "every cloud has a silver lining",
  "the pen is mightier than the sword",
  "when in doubt leave it out",
  "fortune favors the bold and the prepared",
  "a stitch in time saves nine",
  "the proof of the pudding is in the eating",
  "do not count your chickens before they hatch",
  "one good turn deserves another",
  "slow and steady wins the race",
  "two heads are better than one",
  "a picture is worth a thousand words",
  "necessity is the mother of invention",
  "look before you leap into deep water",
  "there is no place like home",
  "the grass is always greener on the other side",
  "honesty is the best policy in all things",
  "knowledge is power and power brings duty",
  "practice what you preach every single day",
  "still waters run deep beneath the surface",
  "you cannot judge a book by its cover",
  "where there is a will there is a way",
];
