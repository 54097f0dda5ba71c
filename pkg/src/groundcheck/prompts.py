"""Prompt templates used by the synthesis pipelines and LLM checker.

Template bodies are fixed strings with named placeholders in square
brackets ([CLAIM], [DOCUMENT], ...). [FACTS] is list-valued and renders
as "- " bulleted lines. Only the declared placeholders of a template are
substituted; other bracketed text (e.g. the "[1]"/"[2]" key examples in
the multi-claim template) is instruction text and passes through as-is.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DataError

# Placeholders whose bindings are lists of strings, rendered as bullets.
LIST_PLACEHOLDERS = frozenset({"FACTS"})


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    body: str
    placeholders: tuple[str, ...]

    def render(self, bindings: dict) -> str:
        """Fill placeholders with bindings; every slot must be provided.

        Missing or extra binding keys fail before any request is sent.
        """
        missing = [p for p in self.placeholders if p not in bindings]
        if missing:
            raise DataError(
                f"template {self.name!r}: missing bindings for {missing}"
            )
        extra = [k for k in bindings if k not in self.placeholders]
        if extra:
            raise DataError(f"template {self.name!r}: unexpected bindings {extra}")
        text = self.body
        for name in self.placeholders:
            value = bindings[name]
            if name in LIST_PLACEHOLDERS:
                if not isinstance(value, (list, tuple)) or not value:
                    raise DataError(
                        f"template {self.name!r}: [{name}] needs a non-empty list"
                    )
                filled = "\n".join(f"- {item}" for item in value)
            else:
                if not isinstance(value, str):
                    raise DataError(
                        f"template {self.name!r}: [{name}] needs a string, "
                        f"got {type(value).__name__}"
                    )
                filled = value
            text = text.replace(f"[{name}]", filled)
        for name in self.placeholders:
            if f"[{name}]" in text:
                raise DataError(
                    f"template {self.name!r}: placeholder [{name}] survived rendering"
                )
        return text


DECOMPOSE_BODY = """Segment the following sentence into individual facts:

Sentence: Other title changes included Lord Steven Regal and The Nasty Boys winning the World Television Championship and the World Tag Team Championship respectively.
Facts:
- Lord Steven Regal won the World Television Championship.
- The Nasty Boys won the World Tag Team Championship.

Sentence: The parkway was opened in 2001 after just under a year of construction and almost two decades of community requests.
Facts:
- The parkway was opened in 2001.
- The parkway was opened after just under a year of construction.
- The parkway was opened after two decades of community requests.

Sentence: Touring began in Europe in April-June with guitarist Paul Gilbert as the opening act, followed by Australia and New Zealand in July, Mexico and South America in late July-August, and concluding in North America in October-November.
Facts:
- Touring began in Europe in April-June.
- The opening act of the tour was guitarist Paul Gilbert.
- The tour was in Australia and New Zealand in July.
- The tour was in Mexico and South America in late July-August.
- The tour was concluded in North America in October-November.

Sentence: In March 2018, the company partnered With Amazon Web Services (AWS) to offer Al-enabled conversational solutions to customers in India.
Facts:
- The company partnered with Amazon Web Services (AWS) in March 2018.
- The two companies partnered to offer Al-enabled conversational solutions to customers in India.

Sentence: The most significant of these is in Germany, which now has a Yazidi community of more than 200,000 living primarily in Hannover, Bielefeld, Celle, Bremen, Bad Oeynhausen, Pforzheim and Oldenburg.
Facts:
- The most significant of these is in Germany.
- Germany now has a Yazidi community of more than 200,000.
- Yazidi community in Germany lives primarily in Hannover, Bielefeld, Celle, Bremen, Bad Oeynhausen, Pforzheim and Oldenburg.

Sentence: A previous six-time winner of the Nations' Cup, Sebastian Vettel became Champion of Champions for the first time, defeating Tom Kristensen, who made the final for the fourth time, 2-0.
Facts:
- Sebastian Vettel is a previous six-time winner of the Nations' Cup.
- Sebastian Vettel became Champion of Champions for the first time, defeating Tom Kristensen, 2-0.
- Tom Kristensen made the final for the fourth time.

Sentence: [SENTENCE]
Facts:"""

EXPAND_PAIR_BODY = """Your task is to generate a pair of sentences so that the provided claim can be entailed by the sentence pair. You must make sure that the claim can only be deduced by combining the information from the two sentences that contain unique information.

Examples:
Provided Claim: The investigation is into allegations that his mayoral campaign received illegal foreign funds.
Sentence 1: During the period leading up to the mayoral election, there was a notable increase in his campaign's financial resources.
Sentence 2: Investigation shows the funds having origins beyond national boundaries, a detail raising questions under current campaign laws.

Provided Claim: Approximately 1,000 fans fainted at the concert.
Sentence 1: Emergency services reported an unusually high number of calls for medical assistance during the concert with an attendance of 20,000.
Sentence 2: Venue officials estimated that approximately 5% of the audience required medical attention for fainting.

Provided Claim: The interest rate hikes were intended to manage inflation and moderate economic growth.
Sentence 1: Central bank officials expressed concern over the rising consumer price index and the overheating of the economy.
Sentence 2: The monetary policy committee decided to adjust the interest rates as a response to these economic indicators.

Provided Claim: Several advertisers are considering halting their ads on social media platform X.
Sentence 1: Some companies are re-evaluating their marketing strategies to avoid association with platforms that fail to address misinformation.
Sentence 2: Recent reports show that platform X has received criticism for its handling of false information spreading unchecked.

Please make sure that NEITHER sentence alone supports the claim.

Your turn:
Provided Claim: [CLAIM]"""

GENERATE_DOC_BODY = """We are creating a news article (one paragraph) in the style of The New York Times. We will give you a list of facts to use when writing your article. You must include all the facts in the list. Never state deduced facts or conclusions. The article should stick to the fact list pretty closely. Include as many sentences as needed to write each fact from the list of facts.

Facts you must include:
[FACTS]"""

ENTAILMENT_BODY = """Source: [SOURCE]
Claim: [CLAIM]

Is the claim fully entailed, or implied, by the source? Please answer with "yes" or "no"."""

SUMMARIZE_CHUNK_BODY = """Document:
[DOCUMENT]

Please generate a summary for the document with the following requirements:
1. The summary should be a fluent and grammatical sentence.
2. The summary should be no more than 15 words.
3. The summary should cover information across the document.
Summary:"""

MERGE_FACTS_BODY = """Merge the following individual facts into a single sentence:

Facts:
- Lord Steven Regal wan the World Television Championship.
- The Nasty Boys wan and the World Tag Team Championship.
Sentence: Other title changes included Lord Steven Regal and The Nasty Boys winning the World Television Championship and the World Tag Team Championship respectively.

Facts:
- The parkway was opened in 2001.
- The parkway was opened after just under a year of construction.
- The parkway was opened after two decades of community requests.
Sentence: The parkway was opened in 2001 after just under a year of construction and almost two decades of community requests.

Facts:
- Touring began in Europe in April-June.
- The opening act was guitarist Paul Gilbert.
- There was a tour in Australia in July.
- There was a tour in New Zealand in July.
- There was a tour in Mexico in late July-August.
- There was a tour in South America in late July-August
- The tour was concluded in North America in October-November.
Sentence: Touring began in Europe in April-June with guitarist Paul Gilbert as the opening act, followed by Australia and New Zealand in July, Mexico and South America in late July-August, and concluding in North America in October-November.

Facts:
- The company partnered with Amazon Web Services (AWS) in March 2018.
- The two companies partnered to offer Al-enabled conversational solutions to customers in India.
Sentence: In March 2018, the company partnered With Amazon Web Services (AWS) to offer Al-enabled conversational solutions to customers in India.

Facts:
- The most significant of these is in Germany.
- Germany now has a Yazidi community of more than 200,000.
- Yazidi community in Germany lives primarily in Hannover.
- Yazidi community in Germany lives primarily in Bielefeld.
- Yazidi community in Germany lives primarily in Celle.
- Yazidi community in Germany lives primarily in Bremen.
- Yazidi community in Germany lives primarily in Bad Oeynhausen.
- Yazidi community in Germany lives primarily in Pforzheim.
- Yazidi community in Germany lives primarily in Oldenburg.
Sentence: The most significant of these is in Germany, which now has a Yazidi community of more than 200,000 living primarily in Hannover, Bielefeld, Celle, Bremen, Bad Oeynhausen, Pforzheim and Oldenburg.

Facts:
- Sebastian Vettel is a previous six-time winner of the Nations' Cup.
- Sebastian Vettel became Champion of Champions for the first time.
- Sebastian Vettel defeated Tom Kristensen.
- Tom Kristensen made the final for the fourth time.
- The score was 2-0.
Sentence: A previous six-time winner of the Nations' Cup, Sebastian Vettel became Champion of Champions for the first time, defeating Tom Kristensen, who made the final for the fourth time, 2-0.

Facts:
[FACTS]
Sentence:"""

CONSISTENCY_BODY = """Determine whether the provided claim is consistent with the corresponding document. Consistency in this context implies that all information presented in the claim is substantiated by the document. If not, it should be considered inconsistent.
Document: [DOCUMENT]
Claim: [CLAIM]
Please assess the claim's consistency with the document by responding with either "yes" or "no".
Answer:"""

DECONTEXTUALIZE_BODY = """You are provied with a context and a claim. Please first determine if the claim can stand alone whitout the conext. If not, provide a decontextualzied version of the claim that incorporates necessary information from the context to make it self-contained. The revision should be as minimum as possible. Please respond with a JSON format: {"label": "yes"/"no", "decontext": "NA"/decontextualized claim}.

Example 1:
Context: There are many reasons why poetry is important for children. Poetry can help children build confidence through memorizing and reciting poems. It can also provide an easy way for children to remember a lesson or value.
Claim: It can also provide an easy way for children to remember a lesson or value.
Answer: {"label": "no", "decontext": "Poetry can provide an easy way for children to remember a lesson or value."}

Example 2:
Context: Yes, ancient societies had concepts of rights. The concept of rights first appeared in the theory of natural law which existed in the state of nature. In this state, people enjoyed certain rights sanctioned by natural law.
Claim: In this state, people enjoyed certain rights sanctioned by natural law.
Answer: {"label": "no", "decontext": "In the state of nature, people enjoyed certain rights sanctioned by natural law"}

Example 3:
Context: The ancient Greeks had some concept of human rights, although there is no single word in classical Greek that captures the sense of "rights" as it is used in modern political thought. However, Greek customs and institutions provided protection to private property unique in the ancient world, instilling a strong sense of equality. The idea of human rights spread quickly from Babylon to Greece and eventually Rome, where the concept of "natural law" arose.
Claim: The idea of human rights spread quickly from Babylon to Greece and eventually Rome, where the concept of "natural law" arose.
Answer: {"label": "yes", "decontext": "NA"}

Your Turn:
Context: [CONTEXT]
Claim: [CLAIM]
Answer:"""

SIMP_SUPPORT_DOC_BODY = """We are creating a news article (one paragraph) in the style of The New York Times. We will give you a claim that must be covered when writing your article. All information in the claim must be supported by weaving together various pieces of evidence within the text. That is, the claim should not be directly supported by using one sentence from the article. The generated article should be around 140 words.

Claim: [CLAIM]
Article:"""

SIMP_REVISE_DOC_BODY = """You are presented with a claim and an article that fully support the claim. You task is to minimally modify the article with the following requirements:

1. The modified article no longer fully supports the claim. Some (but not all) statements in the claim should be supported by the modified article.
2. The edited article looks close to the original claim.
3. The edited claim article should have the similar length with the original article.

The followings are the type of revisions you can use to revise the article:
- Entity revision: An entity (like a person, place, organization, etc.) from a claim is being edited or not mentioned in the revised article.
- Number revision: A number from a claim is being edited or not mentioned in the revised article.
- Attribute revision: A syntax unit (either a word, phrase or clause) that modifies a noun is being edited or not mentioned in the revised article.
- Predicate revision: A main content verb or content like adverbs that closely relate to the verb is being edited or not mentioned in the revised article.

Claim: [CLAIM]
Article: [ARTICLE]

Please respond in a JSON format: {"revision_type": ..., "revised_article": ...}."""

SIMP_EDIT_SUMMARIES_BODY = """Document:
[DOCUMENT]

Consistent Summary:
[CONSISTENT_SUMMARY]

Given the document and consistent summary above, generate 10 slightly modified versions of the summary such that the modifications introduce a factual inconsistency. For example, you can modify a number, date, or entity, and negate or modify a statement. Here are some rules to follow:
- Each modification should change at most 3-4 words from the original summary, and keep the rest the same.
- Each modification should change a different part of the original summary.
- Your modifications should be challenging to detect: modify minimally while still introducing a factual inconsistency.
- The factual inconsistency you introduce should be subtle. For example, if you replace an entity, make sure you replace it with another entity from the document.
- Each modification should start with "[FIRST_THREE_WORDS] [...]", and end with "[LAST_THREE_WORDS]"

Please respond in a JSON format with the following structure:
{"inconsistent_summaries": ["First inconsistent summary", "Second inconsistent summary", ...]}"""

CONSISTENCY_MULTI_BODY = """Determine whether each of the provided claims are consistent with the corresponding document. Consistency in this context implies that all information presented in a claim is substantiated by the document. If not, it should be considered inconsistent.
Document: [DOCUMENT]
Claims: [CLAIM]

Claims are displayed with sentence indices. Please evaluate each claim's consistency with the document by responding with either "yes" or "no" in the JSON format: {"[1]": ..., "[2]": ..., ...}.
Answer:"""


TEMPLATES: dict[str, PromptTemplate] = {
    t.name: t
    for t in (
        PromptTemplate("decompose", DECOMPOSE_BODY, ("SENTENCE",)),
        PromptTemplate("expand-pair", EXPAND_PAIR_BODY, ("CLAIM",)),
        PromptTemplate("generate-doc", GENERATE_DOC_BODY, ("FACTS",)),
        PromptTemplate("entailment", ENTAILMENT_BODY, ("SOURCE", "CLAIM")),
        PromptTemplate("summarize-chunk", SUMMARIZE_CHUNK_BODY, ("DOCUMENT",)),
        PromptTemplate("merge-facts", MERGE_FACTS_BODY, ("FACTS",)),
        PromptTemplate("consistency", CONSISTENCY_BODY, ("DOCUMENT", "CLAIM")),
        PromptTemplate(
            "decontextualize", DECONTEXTUALIZE_BODY, ("CONTEXT", "CLAIM")
        ),
        PromptTemplate("simp-support-doc", SIMP_SUPPORT_DOC_BODY, ("CLAIM",)),
        PromptTemplate(
            "simp-revise-doc", SIMP_REVISE_DOC_BODY, ("CLAIM", "ARTICLE")
        ),
        PromptTemplate(
            "simp-edit-summaries",
            SIMP_EDIT_SUMMARIES_BODY,
            ("DOCUMENT", "CONSISTENT_SUMMARY"),
        ),
        PromptTemplate(
            "consistency-multi", CONSISTENCY_MULTI_BODY, ("DOCUMENT", "CLAIM")
        ),
    )
}


def get_template(name: str) -> PromptTemplate:
    try:
        return TEMPLATES[name]
    except KeyError:
        raise DataError(f"unknown prompt template {name!r}")
