//! Trivia questions that earn XP.
//!
//! The bank is loaded once and never changes. Which questions an account has
//! already answered correctly lives in the ledger, so a question awards XP at
//! most once per account over the whole log.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ledger::{AccountId, LedgerState, Tx};
use crate::rarity::RngStream;

const STARTER_SET: &str = include_str!("../data/questions.json");

#[derive(Debug, Error)]
pub enum TriviaError {
    #[error("question file parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("duplicate question id {0:?}")]
    DuplicateQid(String),
    #[error("question {qid:?}: answer index {index} out of range for {choices} choices")]
    BadAnswerIndex { qid: String, index: usize, choices: usize },
    #[error("question {qid:?}: {reason}")]
    InvalidQuestion { qid: String, reason: &'static str },
    #[error("question bank is empty")]
    EmptyBank,
    #[error("unknown question {0:?}")]
    UnknownQuestion(String),
    #[error("choice {index} out of range for question {qid:?}")]
    BadChoice { qid: String, index: u32 },
    #[error("reading question file: {0}")]
    Io(#[from] std::io::Error),
}

impl TriviaError {
    pub fn machine_code(&self) -> &'static str {
        match self {
            TriviaError::ParseError { .. } => "ParseError",
            TriviaError::DuplicateQid(_) => "DuplicateQid",
            TriviaError::BadAnswerIndex { .. } => "BadAnswerIndex",
            TriviaError::InvalidQuestion { .. } => "InvalidQuestion",
            TriviaError::EmptyBank => "EmptyBank",
            TriviaError::UnknownQuestion(_) => "UnknownQuestion",
            TriviaError::BadChoice { .. } => "BadChoice",
            TriviaError::Io(_) => "Io",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    #[serde(alias = "Easy")]
    Easy,
    #[serde(alias = "Medium")]
    Medium,
    #[serde(alias = "Hard")]
    Hard,
}

impl Difficulty {
    pub fn default_reward(self) -> u64 {
        match self {
            Difficulty::Easy => 10,
            Difficulty::Medium => 20,
            Difficulty::Hard => 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub qid: String,
    pub prompt: String,
    pub choices: Vec<String>,
    pub answer_index: usize,
    pub difficulty: Difficulty,
    pub xp_reward: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuestionEntry {
    qid: String,
    prompt: String,
    choices: Vec<String>,
    answer_index: usize,
    difficulty: Difficulty,
    xp_reward: Option<u64>,
}

/// A question as shown to a player: no answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PublicQuestion<'a> {
    pub qid: &'a str,
    pub prompt: &'a str,
    pub choices: &'a [String],
    pub difficulty: Difficulty,
    pub xp_reward: u64,
}

impl Question {
    pub fn public(&self) -> PublicQuestion<'_> {
        PublicQuestion {
            qid: &self.qid,
            prompt: &self.prompt,
            choices: &self.choices,
            difficulty: self.difficulty,
            xp_reward: self.xp_reward,
        }
    }

    pub fn is_correct(&self, choice_index: u32) -> bool {
        usize::try_from(choice_index).is_ok_and(|i| i == self.answer_index)
    }
}

#[derive(Debug, Clone, Default)]
pub struct QuestionBank {
    questions: Vec<Question>,
    by_qid: HashMap<String, usize>,
}

impl QuestionBank {
    pub fn from_questions(questions: Vec<Question>) -> Result<Self, TriviaError> {
        let mut by_qid = HashMap::with_capacity(questions.len());
        for (i, q) in questions.iter().enumerate() {
            if !(2..=6).contains(&q.choices.len()) {
                return Err(TriviaError::InvalidQuestion {
                    qid: q.qid.clone(),
                    reason: "needs 2 to 6 choices",
                });
            }
            if q.answer_index >= q.choices.len() {
                return Err(TriviaError::BadAnswerIndex {
                    qid: q.qid.clone(),
                    index: q.answer_index,
                    choices: q.choices.len(),
                });
            }
            if q.xp_reward == 0 {
                return Err(TriviaError::InvalidQuestion {
                    qid: q.qid.clone(),
                    reason: "xp reward must be positive",
                });
            }
            if by_qid.insert(q.qid.clone(), i).is_some() {
                return Err(TriviaError::DuplicateQid(q.qid.clone()));
            }
        }
        Ok(QuestionBank { questions, by_qid })
    }

    /// The bundled starter set of trigonometry questions.
    pub fn starter() -> Self {
        load_questions(STARTER_SET).expect("bundled question set is valid")
    }

    pub fn load_file(path: impl AsRef<Path>) -> Result<Self, TriviaError> {
        load_questions(&std::fs::read_to_string(path)?)
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn get(&self, qid: &str) -> Option<&Question> {
        self.by_qid.get(qid).map(|&i| &self.questions[i])
    }
}

/// Parses a JSON array of questions. A missing `xp_reward` defaults by
/// difficulty (10/20/30).
pub fn load_questions(json: &str) -> Result<QuestionBank, TriviaError> {
    let entries: Vec<QuestionEntry> = serde_json::from_str(json).map_err(|e| TriviaError::ParseError {
        line: e.line(),
        message: e.to_string(),
    })?;
    QuestionBank::from_questions(
        entries
            .into_iter()
            .map(|e| Question {
                xp_reward: e.xp_reward.unwrap_or(e.difficulty.default_reward()),
                qid: e.qid,
                prompt: e.prompt,
                choices: e.choices,
                answer_index: e.answer_index,
                difficulty: e.difficulty,
            })
            .collect(),
    )
}

/// Uniform draw over the questions `account` has not yet answered
/// correctly; once all are answered, uniform over the whole bank.
pub fn next_question<'b>(
    bank: &'b QuestionBank,
    state: &LedgerState,
    account: &AccountId,
    stream: &mut RngStream,
) -> Result<&'b Question, TriviaError> {
    if bank.is_empty() {
        return Err(TriviaError::EmptyBank);
    }
    let open: Vec<&Question> = bank
        .questions
        .iter()
        .filter(|q| !state.has_answered(account, &q.qid))
        .collect();
    if open.is_empty() {
        Ok(&bank.questions[stream.next_index(bank.len())])
    } else {
        Ok(open[stream.next_index(open.len())])
    }
}

/// Grades an answer and produces the `AnswerQuestion` transaction recording
/// it. The ledger decides whether XP is actually awarded.
pub fn grade_answer(bank: &QuestionBank, account: &AccountId, qid: &str, choice_index: u32) -> Result<Tx, TriviaError> {
    let q = bank
        .get(qid)
        .ok_or_else(|| TriviaError::UnknownQuestion(qid.to_owned()))?;
    if usize::try_from(choice_index).map_or(true, |i| i >= q.choices.len()) {
        return Err(TriviaError::BadChoice {
            qid: qid.to_owned(),
            index: choice_index,
        });
    }
    Ok(Tx::AnswerQuestion {
        account: account.clone(),
        qid: q.qid.clone(),
        choice_index,
        correct: q.is_correct(choice_index),
        xp_reward: q.xp_reward,
    })
}
