#!/usr/bin/env python3
"""Regenerate the bundled demo embedding table.

Deterministic: every word gets a seeded random unit vector; designated
synonym pairs share an anchor direction with small noise so their cosine
lands well above the matching threshold while unrelated pairs stay below.
"""

from __future__ import annotations

import math
import random
from pathlib import Path

DIM = 24
SEED = 421
OUT = Path(__file__).resolve().parents[1] / "src" / "ontodm" / "assets" / "embeddings.txt"

# pairs the matcher must resolve through vector similarity
SYNONYM_GROUPS = [
    ["internet", "online", "web"],
    ["telefon", "handy", "anruf"],
    ["kosten", "gebühr", "preis"],
    ["konto", "bankkonto"],
    ["filiale", "zweigstelle"],
]

VOCAB = """
finanzprodukt service bank kredit kreditkarte konto girokonto sparkonto
hypothek bestellung unterlagen geldautomat überweisung mastercard
karte darlehen zins zinssatz laufzeit betrag kreditwunsch hinweis
bearbeitungsstand standort euro monat jahr geld zahlung verkehr raum
antrag bestätigung termin webseite weg bereich dienstleistung wunsch
kunde erhöhung aufstockung finanzierung limit status dokument formular
nummer steuer steuernummer berechtigung rahmen haus bau hausbau
banking onlinebanking automat sparen zahlen kaufen verkaufen mieten
versicherung depot aktie fonds börse sparplan dispo dispokredit
ratenkredit autokredit leasingvertrag miete wohnung gebäude grundstück
notar makler zinsbindung tilgung sondertilgung restschuld bonität
schufa einkommen gehalt lohn rente pension arbeitgeber arbeitnehmer
vertrag kündigung widerruf frist mahnung rechnung beleg quittung
kassenbon händler geschäft laden markt supermarkt tankstelle apotheke
reise urlaub flug hotel bahn ticket auto fahrrad motorrad werkstatt
reparatur wartung garantie umtausch rückgabe versand lieferung paket
brief post adresse wohnort stadt land staat region bezirk viertel
straße platz brücke turm gebühren zinssätze laufzeiten beträge
kontoauszug dauerauftrag lastschrift einzug gutschrift buchung saldo
haben soll umsatz ausgabe einnahme budget sparziel notgroschen
rücklage anlage rendite risiko sicherheit pfand bürgschaft bürge
kreditlinie verfügungsrahmen kartenlimit abhebung einzahlung schalter
kasse tresor schließfach beratung berater termin­vereinbarung hotline
servicezeit öffnungszeit feiertag wochenende montag dienstag mittwoch
donnerstag freitag samstag sonntag januar februar märz april mai juni
juli august september oktober november dezember frühling sommer herbst
winter morgen mittag abend nacht woche quartal halbjahr jahrzehnt
prozent promille quote anteil hälfte drittel viertelbetrag summe
gesamtsumme teilbetrag restbetrag vorauszahlung anzahlung schlussrate
zwischensumme netto brutto steuerfrei steuerpflichtig freibetrag
pauschale bonus prämie rabatt skonto aufschlag zuschlag nachlass
gewinn verlust ertrag aufwand bilanz buchhaltung revision prüfung
audit kontrolle aufsicht regulierung gesetz verordnung richtlinie
norm standard zertifikat siegel stempel unterschrift vollmacht
ausweis pass führerschein geburtsurkunde meldebescheinigung formblatt
anlage­blatt deckblatt anhang kopie original duplikat scan foto bild
tabelle liste übersicht zusammenfassung bericht protokoll notiz memo
entwurf konzept plan projekt aufgabe ziel ergebnis erfolg fortschritt
"""


def unit(vec: list[float]) -> list[float]:
    norm = math.sqrt(sum(v * v for v in vec))
    return [v / norm for v in vec]


def random_unit(rng: random.Random) -> list[float]:
    return unit([rng.gauss(0.0, 1.0) for _ in range(DIM)])


def cos(u: list[float], v: list[float]) -> float:
    return sum(a * b for a, b in zip(u, v))


def sample_apart(rng: random.Random, existing: list[list[float]], limit: float) -> list[float]:
    """Unit vector whose |cosine| against every existing vector stays below limit."""
    for _ in range(10000):
        vec = random_unit(rng)
        if all(abs(cos(vec, other)) < limit for other in existing):
            return vec
    raise RuntimeError("could not place a sufficiently separated vector")


def main() -> None:
    rng = random.Random(SEED)
    words: list[str] = []
    for w in VOCAB.split():
        w = w.replace("­", "")
        if w not in words:
            words.append(w)
    for group in SYNONYM_GROUPS:
        for w in group:
            if w not in words:
                words.append(w)

    vectors: dict[str, list[float]] = {}
    placed: list[list[float]] = []
    grouped = {w: i for i, g in enumerate(SYNONYM_GROUPS) for w in g}

    for group in SYNONYM_GROUPS:
        anchor = sample_apart(rng, placed, 0.35)
        members: list[list[float]] = []
        for word in group:
            # small noise keeps in-group cosine ~0.8 while rejection keeps
            # cross-group cosine well under the matching threshold
            for _ in range(10000):
                noise = [rng.gauss(0.0, 0.10) for _ in range(DIM)]
                vec = unit([a + n for a, n in zip(anchor, noise)])
                if (
                    cos(vec, anchor) >= 0.90
                    and all(cos(vec, m) >= 0.75 for m in members)
                    and all(abs(cos(vec, other)) < 0.55 for other in placed)
                ):
                    break
            else:
                raise RuntimeError(f"could not place group word {word}")
            vectors[word] = vec
            members.append(vec)
        placed.extend(members)

    for word in words:
        if word not in vectors:
            vectors[word] = sample_apart(rng, placed, 0.55)
            placed.append(vectors[word])

    # make sure unrelated pairs stay clearly below the matching threshold
    names = list(vectors)
    worst = 0.0
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            if grouped.get(a) is not None and grouped.get(a) == grouped.get(b):
                continue
            worst = max(worst, abs(cos(vectors[a], vectors[b])))
    assert worst < 0.62, f"unrelated pair too close: {worst}"
    for group in SYNONYM_GROUPS:
        for i, a in enumerate(group):
            for b in group[i + 1 :]:
                sim = cos(vectors[a], vectors[b])
                assert sim >= 0.70, f"synonym pair too far: {a}/{b} {sim}"

    lines = [f"{len(vectors)} {DIM}"]
    for word in sorted(vectors):
        values = " ".join(f"{v:.5f}" for v in vectors[word])
        lines.append(f"{word} {values}")
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(vectors)} vectors (dim {DIM}) to {OUT}")


if __name__ == "__main__":
    main()
