from typing import Dict, List

class PredefinedQuestionsManager:
    def __init__(self):
        self.questions: Dict[str, List[str]] = {
            "trec": [
                "What is the full form of .com ?",
                "Who killed Gandhi ?",
                "How far is it from Denver to Aspen ?",
                "What county is Modesto , California in ?",
            ],
            "sst2": [
                "a gorgeous , witty , seductive movie .",
                "the plot is nothing but boilerplate clichés from start to finish .",
            ],
            "agnews": [
                "Oil prices climb as supply worries persist in the Gulf",
                "Red Sox rally in the ninth to beat the Yankees",
            ],
        }

    def get_questions(self, dataset: str) -> List[str]:
        return self.questions.get(dataset, [])
