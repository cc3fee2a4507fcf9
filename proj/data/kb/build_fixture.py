#!/usr/bin/env python3
"""Regenerates the bundled test knowledge base and lexicon.

Writes concepts.tsv, triples.tsv (next to this script) and ../lexicon.tsv.
A handful of identifiers are well-known UMLS CUIs / LOINC codes; the rest,
including every code prefixed 99, are synthetic and only meaningful inside
this fixture. Every (system, code) pair belongs to exactly one concept.
"""

import itertools
import os

HERE = os.path.dirname(os.path.abspath(__file__))

concepts = []   # (cui, name, semtypes, codes)
triples = []    # (s, p, o, qualifier)
lexicon = []    # (phrase, cui, semtypes)

_syn = itertools.count(1)
_snomed = itertools.count(990000001)
_icd = itertools.count(1)
_rx = itertools.count(9900001)
_loinc = itertools.count(99001)
_by_name = {}


def cx():
    return "CX%07d" % next(_syn)


def concept(name, semtypes, cui=None, codes=(), parents=(), synonyms=(), lexical=True,
            snomed=False, icd=False, rxnorm=False, loinc=None):
    cui = cui or cx()
    codes = list(codes)
    if snomed:
        codes.append("SNOMED:%d" % next(_snomed))
    if icd:
        codes.append("ICD10:Z99.%03d" % next(_icd))
    if rxnorm:
        codes.append("RXNORM:%d" % next(_rx))
    if loinc == "auto":
        codes.append("LOINC:%d-0" % next(_loinc))
    elif loinc:
        codes.append("LOINC:" + loinc)
    concepts.append((cui, name, semtypes, codes))
    _by_name[name.lower()] = cui
    for p in parents:
        triples.append((cui, "isa", ref(p), None))
    if lexical:
        for phrase in [name] + list(synonyms):
            lexicon.append((phrase.lower(), cui, semtypes))
    return cui


def ref(x):
    return _by_name.get(x.lower(), x)


def rel(s, p, o, q=None):
    triples.append((ref(s), p, ref(o), q))


# --- roots -----------------------------------------------------------------
concept("Person", "popg", cui="C0027361", lexical=False)
concept("Disease", "dsyn", cui="C0012634", lexical=False)
concept("Finding", "fndg", cui="C0243095", lexical=False)
concept("Therapeutic or preventive procedure", "topp", cui="C0087111", lexical=False)
concept("Pharmaceutical preparation", "phsu", cui="C0013227", lexical=False)
concept("Laboratory test or measurement", "lbpr", cui="C0022885", lexical=False)
concept("Physiologic function", "phsf", lexical=False)

# --- physiologic functions (reasoning targets; never coded) -----------------
for fn in ["Respiratory function", "Renal function", "Cardiac function", "Hepatic function",
           "Cognitive function"]:
    concept(fn, "phsf", parents=["Physiologic function"])

# --- diseases ----------------------------------------------------------------
concept("Diabetes mellitus", "dsyn", cui="C0011849", parents=["Disease"], snomed=True, icd=True,
        synonyms=["diabetes", "diabetic", "diabetics", "dm"])
concept("Type 2 diabetes mellitus", "dsyn", cui="C0011860", parents=["Diabetes mellitus"],
        codes=["SNOMED:44054006", "ICD10:E11.9"], synonyms=["type 2 diabetes", "t2dm", "type ii diabetes"])
concept("Type 2 diabetes with kidney complications", "dsyn", cui="C2874072",
        parents=["Type 2 diabetes mellitus"], codes=["ICD10:E11.2"], snomed=True,
        synonyms=["diabetic nephropathy"])
concept("Type 2 diabetes with hyperglycemia", "dsyn", parents=["Type 2 diabetes mellitus"],
        codes=["ICD10:E11.65"], snomed=True)
concept("Type 2 diabetes with neuropathy", "dsyn", parents=["Type 2 diabetes mellitus"],
        codes=["ICD10:E11.40"], snomed=True, synonyms=["diabetic neuropathy"])
concept("Type 1 diabetes mellitus", "dsyn", cui="C0011854", parents=["Diabetes mellitus"],
        codes=["SNOMED:46635009", "ICD10:E10.9"], synonyms=["type 1 diabetes", "t1dm"])
concept("Gestational diabetes", "dsyn", cui="C0085207", parents=["Diabetes mellitus"],
        codes=["ICD10:O24.4"], snomed=True)

concept("Asthma", "dsyn", cui="C0004096", parents=["Disease"], codes=["SNOMED:195967001", "ICD10:J45.909"])
concept("Allergic asthma", "dsyn", parents=["Asthma"], snomed=True, icd=True)
concept("Exercise-induced asthma", "dsyn", parents=["Asthma"], snomed=True, icd=True)
concept("Chronic obstructive pulmonary disease", "dsyn", cui="C0024117", parents=["Disease"],
        codes=["ICD10:J44.9"], snomed=True, synonyms=["copd"])
concept("Cystic fibrosis", "dsyn", parents=["Disease"], codes=["ICD10:E84.9"], snomed=True)
concept("Pneumonia", "dsyn", cui="C0032285", parents=["Disease"], codes=["ICD10:J18.9"], snomed=True)
concept("Pulmonary fibrosis", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Bronchiectasis", "dsyn", parents=["Disease"], snomed=True, icd=True)

concept("Infection", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["infections"])
concept("Viral infection", "dsyn", parents=["Infection"], snomed=True, icd=True)
concept("Bacterial infection", "dsyn", parents=["Infection"], snomed=True, icd=True)
concept("Urinary tract infection", "dsyn", parents=["Bacterial infection"], snomed=True, icd=True,
        synonyms=["uti"])
concept("Wound infection", "dsyn", parents=["Infection"], snomed=True, icd=True)
concept("Respiratory tract infection", "dsyn", parents=["Infection"], snomed=True, icd=True)
concept("Opportunistic infection", "dsyn", parents=["Infection"], snomed=True, icd=True)
concept("COVID-19", "dsyn", cui="C5203670", parents=["Viral infection"], codes=["ICD10:U07.1"],
        snomed=True, synonyms=["covid", "sars-cov-2 infection"])
concept("Influenza", "dsyn", parents=["Viral infection"], snomed=True, icd=True, synonyms=["flu"])
concept("Mycosis", "dsyn", cui="C0026946", parents=["Infection"], codes=["ICD10:B49"], snomed=True,
        synonyms=["fungal infection", "mycoses"])
concept("Candidiasis", "dsyn", parents=["Mycosis"], snomed=True, icd=True)
concept("Aspergillosis", "dsyn", parents=["Mycosis"], snomed=True, icd=True)
concept("Tuberculosis", "dsyn", parents=["Bacterial infection"], snomed=True, icd=True, synonyms=["tb"])
concept("HIV infection", "dsyn", parents=["Viral infection"], snomed=True, icd=True, synonyms=["hiv"])
concept("Hepatitis C", "dsyn", cui="C0019196", parents=["Viral infection"], codes=["ICD10:B18.2"],
        snomed=True, synonyms=["hcv", "hepatitis c infection"])
concept("Acute hepatitis C", "dsyn", parents=["Hepatitis C"], snomed=True, icd=True)
concept("Hepatitis B", "dsyn", parents=["Viral infection"], snomed=True, icd=True, synonyms=["hbv"])
concept("Sepsis", "dsyn", parents=["Infection"], snomed=True, icd=True)

concept("Multiple sclerosis", "dsyn", cui="C0026769", parents=["Disease"],
        codes=["SNOMED:24700007", "ICD10:G35"], synonyms=["ms"])
for ms in ["Multiple sclerosis of the spinal cord", "Multiple sclerosis of the brain stem",
           "Acute relapsing multiple sclerosis", "Relapsing remitting multiple sclerosis",
           "Secondary progressive multiple sclerosis", "Primary progressive multiple sclerosis",
           "Progressive relapsing multiple sclerosis", "Multiple sclerosis in remission",
           "Malignant multiple sclerosis", "Benign multiple sclerosis"]:
    concept(ms, "dsyn", parents=["Multiple sclerosis"], snomed=True)

concept("Sleep disorder", "dsyn", cui="C0851578", parents=["Disease"], snomed=True,
        codes=["ICD10:G47.9"], synonyms=["sleep disorders", "sleep disturbance"])
concept("Drowsiness", "sosy", cui="C0013144", parents=["Sleep disorder"], codes=["ICD10:R40.0"],
        snomed=True, synonyms=["sleepiness", "somnolence"])
concept("Snoring", "sosy", cui="C0037384", parents=["Sleep disorder"], codes=["ICD10:R06.83"], snomed=True)
concept("Narcolepsy", "dsyn", cui="C0027404", parents=["Sleep disorder"], snomed=True, icd=True)
concept("Shift work sleep disorder", "dsyn", parents=["Sleep disorder"], snomed=True, icd=True)
concept("Insomnia", "dsyn", parents=["Sleep disorder"], snomed=True, icd=True)
concept("Sleep apnea", "dsyn", parents=["Sleep disorder"], snomed=True, icd=True,
        synonyms=["obstructive sleep apnea", "osa"])

concept("Cardiac arrest", "dsyn", cui="C0018790", parents=["Disease"], codes=["SNOMED:410429000", "ICD10:I46.9"],
        synonyms=["out of hospital cardiac arrest", "heart arrest"])
concept("Coma", "dsyn", cui="C0009421", parents=["Disease"], codes=["ICD10:R40.20"], snomed=True)
concept("Hypertension", "dsyn", cui="C0020538", parents=["Disease"], codes=["ICD10:I10"], snomed=True,
        synonyms=["hypertensive disease", "high blood pressure", "htn"])
concept("Heart failure", "dsyn", cui="C0018801", parents=["Disease"], codes=["ICD10:I50.9"], snomed=True,
        synonyms=["congestive heart failure", "chf"])
concept("Atrial fibrillation", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["afib"])
concept("Cardiac arrhythmia", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["arrhythmia"])
concept("Myocardial infarction", "dsyn", parents=["Disease"], snomed=True, icd=True,
        synonyms=["heart attack", "mi"])
concept("Coronary artery disease", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["cad"])
concept("Stroke", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["cerebrovascular accident"])
concept("Peripheral artery disease", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Deep vein thrombosis", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["dvt"])
concept("Pulmonary embolism", "dsyn", parents=["Disease"], snomed=True, icd=True)

concept("Crohn disease", "dsyn", cui="C0010346", parents=["Disease"], snomed=True, icd=True,
        synonyms=["crohn's disease", "crohns disease"])
concept("Ulcerative colitis", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Peptic ulcer", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["peptic ulcer disease"])
concept("Cirrhosis", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["liver cirrhosis"])
concept("Pancreatitis", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Chronic kidney disease", "dsyn", cui="C1561643", parents=["Disease"], snomed=True, icd=True,
        synonyms=["ckd", "chronic renal disease"])
concept("End stage renal disease", "dsyn", parents=["Chronic kidney disease"], snomed=True, icd=True,
        synonyms=["esrd"])
concept("Acute kidney injury", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["aki"])
concept("Renal insufficiency", "dsyn", parents=["Disease"], snomed=True, icd=True)

concept("Malignant neoplasm", "neop", parents=["Disease"], snomed=True, icd=True, synonyms=["cancer", "malignancy"])
for site in ["Ovarian carcinoma", "Breast cancer", "Lung cancer", "Colorectal cancer", "Prostate cancer",
             "Pancreatic cancer", "Melanoma", "Hepatocellular carcinoma", "Glioblastoma",
             "Bladder cancer", "Renal cell carcinoma", "Gastric cancer", "Cervical cancer",
             "Endometrial cancer", "Thyroid cancer", "Esophageal cancer", "Head and neck cancer"]:
    cui = "C0029925" if site == "Ovarian carcinoma" else None
    concept(site, "neop", cui=cui, parents=["Malignant neoplasm"], snomed=True, icd=True,
            synonyms=["ovarian cancer"] if site == "Ovarian carcinoma" else [])
concept("Leukemia", "neop", parents=["Malignant neoplasm"], snomed=True, icd=True)
concept("Chronic lymphocytic leukemia", "neop", cui="C0023434", parents=["Leukemia"], snomed=True,
        icd=True, synonyms=["cll"])
concept("Acute myeloid leukemia", "neop", parents=["Leukemia"], snomed=True, icd=True, synonyms=["aml"])
concept("Lymphoma", "neop", parents=["Malignant neoplasm"], snomed=True, icd=True)
concept("Multiple myeloma", "neop", parents=["Malignant neoplasm"], snomed=True, icd=True)

concept("Depression", "mobd", parents=["Disease"], snomed=True, icd=True, synonyms=["major depressive disorder"])
concept("Schizophrenia", "mobd", parents=["Disease"], snomed=True, icd=True)
concept("Bipolar disorder", "mobd", parents=["Disease"], snomed=True, icd=True)
concept("Dementia", "mobd", parents=["Disease"], snomed=True, icd=True)
concept("Alzheimer disease", "dsyn", parents=["Dementia"], snomed=True, icd=True)
concept("Epilepsy", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["seizure disorder"])
concept("Parkinson disease", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Migraine", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Glaucoma", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Obesity", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Anemia", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Thrombocytopenia", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["low platelets"])
concept("Hyperglycemia", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Hypoglycemia", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Hyperkalemia", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Hypothyroidism", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Rheumatoid arthritis", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Osteoarthritis", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Lupus", "dsyn", parents=["Disease"], snomed=True, icd=True, synonyms=["systemic lupus erythematosus"])
concept("Psoriasis", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Osteoporosis", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Common cold", "dsyn", parents=["Viral infection"], snomed=True, icd=True, synonyms=["cold"])
concept("Drug allergy", "dsyn", parents=["Disease"], snomed=True, icd=True)
concept("Penicillin allergy", "dsyn", parents=["Drug allergy"], snomed=True, icd=True)
concept("Latex allergy", "dsyn", parents=["Disease"], snomed=True, icd=True)

# --- findings / symptoms -------------------------------------------------------
concept("Dyspnea", "sosy", cui="C0013404", parents=["Finding"], snomed=True, icd=True,
        synonyms=["shortness of breath"])
concept("Wheezing", "sosy", cui="C0043144", parents=["Finding"], codes=["ICD10:R06.2"], snomed=True)
concept("Cough", "sosy", parents=["Finding"], snomed=True, icd=True)
concept("Fever", "sosy", parents=["Finding"], snomed=True, icd=True)
concept("Fatigue", "sosy", parents=["Finding"], snomed=True, icd=True)
concept("Chest pain", "sosy", parents=["Finding"], snomed=True, icd=True)
concept("Polyuria", "sosy", parents=["Finding"], snomed=True, icd=True)
concept("Weight loss", "fndg", parents=["Finding"], snomed=True, icd=True)
concept("Hemoptysis", "sosy", parents=["Finding"], snomed=True, icd=True)
concept("Tobacco smoking", "inbe", parents=["Finding"], snomed=True, icd=True,
        synonyms=["smoke", "smoking", "smoker", "smokers", "current smoker"])
concept("Alcohol abuse", "inbe", parents=["Finding"], snomed=True, icd=True)
concept("Pregnancy", "orgf", parents=["Finding"], snomed=True, icd=True, synonyms=["pregnant"])
concept("Breastfeeding", "orgf", parents=["Finding"], snomed=True, icd=True, synonyms=["lactating"])

# --- procedures ---------------------------------------------------------------
for proc, syns in [("Polysomnography", ["sleep study"]), ("Multiple sleep latency test", []),
                   ("Hysterectomy", []), ("Appendectomy", []), ("Coronary artery bypass graft", ["cabg"]),
                   ("Hemodialysis", ["dialysis"]), ("Kidney transplant", ["renal transplant"]),
                   ("Mechanical ventilation", []), ("Colonoscopy", []),
                   ("Therapeutic hypothermia", ["cooling", "targeted temperature management"]),
                   ("Bone marrow transplant", []), ("Chemotherapy", []), ("Radiation therapy", ["radiotherapy"]),
                   ("Liver transplant", []), ("Percutaneous coronary intervention", ["pci"]),
                   ("Bariatric surgery", []), ("Mastectomy", []), ("Oophorectomy", []),
                   ("Cardiac catheterization", []), ("Lumbar puncture", [])]:
    concept(proc, "topp", parents=["Therapeutic or preventive procedure"], snomed=True, synonyms=syns)

# --- drugs ---------------------------------------------------------------------
for drug, syns in [("Methylprednisolone", ["solu-medrol"]), ("Prednisone", []), ("Albuterol", ["salbutamol"]),
                   ("Fluticasone", []), ("Montelukast", []), ("Tiotropium", []), ("Metformin", []),
                   ("Insulin", []), ("Interferon beta-1a", []), ("Natalizumab", []), ("Sofosbuvir", []),
                   ("Ibrutinib", []), ("Cisplatin", []), ("Carboplatin", []), ("Ibuprofen", []),
                   ("Lisinopril", []), ("Warfarin", []), ("Azithromycin", []), ("Fluconazole", []),
                   ("Nitrofurantoin", []), ("Remdesivir", []), ("Infliximab", []), ("Adalimumab", []),
                   ("Atorvastatin", []), ("Aspirin", []), ("Levothyroxine", []), ("Sertraline", []),
                   ("Levetiracetam", []), ("Methotrexate", []), ("Tacrolimus", []), ("Penicillin", []),
                   ("Oseltamivir", []), ("Glipizide", []), ("Empagliflozin", []), ("Amiodarone", [])]:
    cui = "C0025815" if drug == "Methylprednisolone" else None
    concept(drug, "phsu", cui=cui, parents=["Pharmaceutical preparation"], rxnorm=True, synonyms=syns)

# --- laboratory tests ------------------------------------------------------------
concept("Blood count", "lbpr", parents=["Laboratory test or measurement"], lexical=False)
concept("Chemistry test", "lbpr", parents=["Laboratory test or measurement"], lexical=False)
concept("Vital sign measurement", "lbpr", parents=["Laboratory test or measurement"], lexical=False)
concept("Platelet count measurement", "lbpr", cui="C0032181", synonyms=["platelet count", "platelets"])
concept("Platelet # Bld Auto", "lbtr", cui="C0362994", parents=["Blood count"], loinc="777-3",
        synonyms=["platelet count", "platelets", "platelet"])
concept("Hemoglobin measurement", "lbpr", synonyms=["hemoglobin", "hgb"])
concept("Hemoglobin [Mass/volume] in Blood", "lbtr", parents=["Blood count"], loinc="718-7",
        synonyms=["hemoglobin", "hgb", "hb"])
concept("Leukocytes [#/volume] in Blood", "lbtr", parents=["Blood count"], loinc="6690-2",
        synonyms=["white blood cell count", "wbc", "leukocyte count"])
concept("Neutrophils [#/volume] in Blood", "lbtr", parents=["Blood count"], loinc="751-8",
        synonyms=["absolute neutrophil count", "anc"])
concept("Creatinine measurement", "lbpr", synonyms=["creatinine"])
concept("Creatinine [Mass/volume] in Serum or Plasma", "lbtr", parents=["Chemistry test"], loinc="2160-0",
        synonyms=["serum creatinine", "creatinine", "scr"])
concept("Creatinine renal clearance", "lbtr", parents=["Chemistry test"], loinc="2164-8",
        synonyms=["creatinine clearance", "crcl"])
concept("Glomerular filtration rate", "lbtr", parents=["Chemistry test"], loinc="33914-3",
        synonyms=["egfr", "gfr", "estimated glomerular filtration rate"])
concept("Glucose [Mass/volume] in Serum or Plasma", "lbtr", parents=["Chemistry test"], loinc="2345-7",
        synonyms=["glucose", "blood glucose", "fasting glucose"])
concept("Hemoglobin A1c", "lbtr", parents=["Chemistry test"], loinc="4548-4", synonyms=["hba1c", "a1c"])
concept("Alanine aminotransferase", "lbtr", parents=["Chemistry test"], loinc="1742-6", synonyms=["alt"])
concept("Total bilirubin", "lbtr", parents=["Chemistry test"], loinc="1975-2", synonyms=["bilirubin"])
concept("Potassium [Moles/volume] in Serum or Plasma", "lbtr", parents=["Chemistry test"], loinc="2823-3",
        synonyms=["potassium", "serum potassium"])
concept("Albumin [Mass/volume] in Serum or Plasma", "lbtr", parents=["Chemistry test"], loinc="1751-7",
        synonyms=["albumin", "serum albumin"])
concept("Body mass index", "clna", cui="C1305855", parents=["Vital sign measurement"], loinc="39156-5",
        synonyms=["bmi"])
concept("Systolic blood pressure", "clna", parents=["Vital sign measurement"], loinc="8480-6",
        synonyms=["sbp"])
concept("Oxygen saturation", "clna", parents=["Vital sign measurement"], loinc="59408-5",
        synonyms=["spo2"])
concept("Body temperature", "clna", parents=["Vital sign measurement"], loinc="8310-5",
        synonyms=["temperature"])

# --- homonyms that semantic-type filtering must remove ----------------------------
concept("BMI 60", "orch", cui="C0910133", synonyms=["bmi"])
concept("Type 2 diabetes test strip", "medd", synonyms=["type 2 diabetes"])
concept("Infection control kit", "medd", synonyms=["infection"])
concept("Cold temperature", "npop", synonyms=["cold"])
concept("Platelet product", "bodm", synonyms=["platelets"])

# --- relations -------------------------------------------------------------------
for c in ["Asthma", "Chronic obstructive pulmonary disease", "Cystic fibrosis", "Pneumonia",
          "Pulmonary fibrosis", "Bronchiectasis", "COVID-19"]:
    rel(c, "affects", "Respiratory function")
for c in ["Chronic kidney disease", "Acute kidney injury", "Renal insufficiency",
          "Type 2 diabetes with kidney complications"]:
    rel(c, "affects", "Renal function")
for c in ["Heart failure", "Myocardial infarction", "Cardiac arrhythmia", "Atrial fibrillation"]:
    rel(c, "affects", "Cardiac function")
for c in ["Cirrhosis", "Hepatitis C", "Hepatitis B"]:
    rel(c, "affects", "Hepatic function")
for c in ["Dementia", "Alzheimer disease"]:
    rel(c, "affects", "Cognitive function")

for drug, conds in {
    "Methylprednisolone": ["Asthma", "Chronic obstructive pulmonary disease", "Multiple sclerosis",
                           "Rheumatoid arthritis", "Lupus"],
    "Prednisone": ["Asthma", "Chronic obstructive pulmonary disease", "Rheumatoid arthritis", "Crohn disease"],
    "Albuterol": ["Asthma", "Chronic obstructive pulmonary disease"],
    "Fluticasone": ["Asthma"],
    "Montelukast": ["Asthma", "Allergic asthma"],
    "Tiotropium": ["Chronic obstructive pulmonary disease"],
    "Azithromycin": ["Pneumonia", "Cystic fibrosis", "Bacterial infection"],
    "Remdesivir": ["COVID-19"],
    "Metformin": ["Type 2 diabetes mellitus"],
    "Glipizide": ["Type 2 diabetes mellitus"],
    "Empagliflozin": ["Type 2 diabetes mellitus", "Heart failure"],
    "Insulin": ["Diabetes mellitus"],
    "Interferon beta-1a": ["Multiple sclerosis"],
    "Natalizumab": ["Multiple sclerosis", "Crohn disease"],
    "Sofosbuvir": ["Hepatitis C"],
    "Ibrutinib": ["Chronic lymphocytic leukemia"],
    "Cisplatin": ["Ovarian carcinoma", "Lung cancer"],
    "Carboplatin": ["Ovarian carcinoma"],
    "Infliximab": ["Crohn disease", "Ulcerative colitis", "Rheumatoid arthritis"],
    "Adalimumab": ["Crohn disease", "Psoriasis", "Rheumatoid arthritis"],
    "Lisinopril": ["Hypertension", "Heart failure"],
    "Warfarin": ["Atrial fibrillation", "Deep vein thrombosis", "Pulmonary embolism"],
    "Amiodarone": ["Cardiac arrhythmia", "Atrial fibrillation"],
    "Fluconazole": ["Mycosis", "Candidiasis"],
    "Nitrofurantoin": ["Urinary tract infection"],
    "Oseltamivir": ["Influenza"],
    "Levothyroxine": ["Hypothyroidism"],
    "Sertraline": ["Depression"],
    "Levetiracetam": ["Epilepsy"],
    "Methotrexate": ["Rheumatoid arthritis", "Psoriasis"],
    "Atorvastatin": ["Coronary artery disease"],
    "Aspirin": ["Coronary artery disease", "Myocardial infarction"],
}.items():
    for c in conds:
        rel(drug, "treats", c)

for cond, drugs in {
    "Mycosis": ["Methylprednisolone", "Prednisone", "Infliximab"],
    "Tuberculosis": ["Methylprednisolone", "Infliximab", "Adalimumab"],
    "Peptic ulcer": ["Prednisone", "Ibuprofen", "Aspirin"],
    "Cardiac arrhythmia": ["Albuterol"],
    "Glaucoma": ["Tiotropium"],
    "Chronic kidney disease": ["Metformin", "Nitrofurantoin", "Ibuprofen"],
    "Pregnancy": ["Warfarin", "Lisinopril", "Methotrexate", "Atorvastatin"],
    "Hyperkalemia": ["Lisinopril"],
    "Penicillin allergy": ["Penicillin"],
    "Opportunistic infection": ["Natalizumab"],
    "Cirrhosis": ["Methotrexate"],
}.items():
    for d in drugs:
        rel(cond, "contraindicated_with", d)

for cond, symptoms in {
    "Asthma": ["Wheezing", "Dyspnea", "Cough"],
    "Chronic obstructive pulmonary disease": ["Dyspnea", "Cough", "Wheezing"],
    "COVID-19": ["Fever", "Cough", "Dyspnea", "Fatigue"],
    "Influenza": ["Fever", "Cough", "Fatigue"],
    "Pneumonia": ["Fever", "Cough", "Dyspnea"],
    "Tuberculosis": ["Cough", "Hemoptysis", "Weight loss", "Fever"],
    "Heart failure": ["Dyspnea", "Fatigue"],
    "Myocardial infarction": ["Chest pain", "Dyspnea"],
    "Diabetes mellitus": ["Polyuria", "Fatigue"],
    "Sleep apnea": ["Snoring", "Drowsiness"],
    "Narcolepsy": ["Drowsiness"],
}.items():
    for s in symptoms:
        rel(cond, "has_symptom", s)

rel("Platelet # Bld Auto", "lab_maps_to_phenotype", "Thrombocytopenia", "low")
rel("Hemoglobin [Mass/volume] in Blood", "lab_maps_to_phenotype", "Anemia", "low")
rel("Glucose [Mass/volume] in Serum or Plasma", "lab_maps_to_phenotype", "Hyperglycemia", "high")
rel("Glucose [Mass/volume] in Serum or Plasma", "lab_maps_to_phenotype", "Hypoglycemia", "low")
rel("Hemoglobin A1c", "lab_maps_to_phenotype", "Diabetes mellitus", "high")
rel("Creatinine [Mass/volume] in Serum or Plasma", "lab_maps_to_phenotype", "Renal insufficiency", "high")
rel("Potassium [Moles/volume] in Serum or Plasma", "lab_maps_to_phenotype", "Hyperkalemia", "high")
rel("Body mass index", "lab_maps_to_phenotype", "Obesity", "high")


def main():
    seen = set()
    for _, _, _, codes in concepts:
        for c in codes:
            assert c not in seen, c
            seen.add(c)
    with open(os.path.join(HERE, "concepts.tsv"), "w") as f:
        f.write("# cui\tpreferred_name\tsemantic_types\tcodes (system:code;...)\n")
        f.write("# Generated by build_fixture.py. Codes prefixed 99 / Z99 are synthetic.\n")
        for cui, name, st, codes in concepts:
            f.write("%s\t%s\t%s\t%s\n" % (cui, name, st, ";".join(codes)))
    with open(os.path.join(HERE, "triples.tsv"), "w") as f:
        f.write("# subject\tpredicate\tobject\t[qualifier]\n")
        f.write("# Generated by build_fixture.py.\n")
        for s, p, o, q in triples:
            f.write("%s\t%s\t%s%s\n" % (s, p, o, ("\t" + q) if q else ""))
    with open(os.path.join(HERE, "..", "lexicon.tsv"), "w") as f:
        f.write("# phrase\tcui\tsemantic_types\n")
        f.write("# Generated by kb/build_fixture.py.\n")
        for phrase, cui, st in sorted(set(lexicon)):
            f.write("%s\t%s\t%s\n" % (phrase, cui, st))
    print("%d concepts, %d triples, %d lexicon entries" % (len(concepts), len(triples), len(set(lexicon))))


if __name__ == "__main__":
    main()
