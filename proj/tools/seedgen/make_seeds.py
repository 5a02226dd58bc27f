#!/usr/bin/env python3
"""Regenerates the bundled language seed corpora under data/seeds/.

The corpora are composed from hand-written vocabulary and sentence frames so
that they can be redistributed without licensing concerns. Output is fully
determined by the fixed RNG seeds below; rerunning reproduces the committed
files byte for byte.

Usage: python3 tools/seedgen/make_seeds.py [data/seeds]
"""

import random
import sys
from pathlib import Path

ID = {
    "subj": [
        "saya", "kami", "mereka", "warga", "para pedagang", "ibu saya", "ayah",
        "tetangga kami", "petani di desa", "pengemudi ojek", "guru itu",
        "mahasiswa", "anak-anak", "pemerintah daerah", "kepala desa",
        "nelayan", "karyawan kantor", "penjual sayur", "dokter puskesmas",
        "sopir angkot", "pemilik warung", "adik saya", "kakak perempuan saya",
        "teman sekelas", "pengurus masjid", "polisi lalu lintas", "bidan desa",
        "wartawan", "pengusaha muda", "buruh pabrik", "ketua rukun tetangga",
    ],
    "verb_obj": [
        "membeli beras di pasar", "menjual ikan segar", "membaca koran pagi",
        "menonton berita di televisi", "memperbaiki jalan rusak",
        "membersihkan selokan", "menanam padi di sawah", "memasak sayur asem",
        "mengantar anak ke sekolah", "menunggu bus di halte",
        "mengirim paket ke kota", "membayar tagihan listrik",
        "mengisi bensin di pom", "menulis surat untuk keluarga",
        "mencari pekerjaan baru", "membuka toko kelontong",
        "mengikuti rapat warga", "membangun rumah sederhana",
        "menyiapkan makanan untuk tamu", "mendengarkan radio",
        "mengumpulkan sampah plastik", "menjaga kebersihan lingkungan",
        "mengajar bahasa inggris", "mengobati pasien", "merawat kebun",
        "mengurus surat izin usaha", "menabung di bank", "memesan ojek daring",
        "menyeberang jalan dengan hati-hati", "mencuci pakaian",
        "membahas anggaran desa", "menyusun laporan keuangan",
        "meminjam buku di perpustakaan", "memotret pemandangan",
        "menghadiri pernikahan saudara", "menjenguk teman yang sakit",
    ],
    "time": [
        "setiap pagi", "kemarin sore", "minggu lalu", "tadi malam",
        "pada akhir pekan", "bulan depan", "sejak tahun lalu", "hari ini",
        "besok pagi", "sebelum subuh", "setelah makan siang", "menjelang magrib",
        "pada musim hujan", "selama liburan sekolah", "beberapa hari terakhir",
        "sesudah pulang kerja",
    ],
    "place": [
        "di kota", "di kampung", "di pasar tradisional", "di dekat stasiun",
        "di pinggir jalan", "di balai desa", "di kantor kecamatan",
        "di rumah sakit", "di sekolah dasar", "di pelabuhan", "di terminal",
        "di alun-alun", "di warung kopi", "di kebun belakang rumah",
        "di perumahan baru", "di pusat perbelanjaan",
    ],
    "adj_subj": [
        "cuaca", "jalan itu", "harga sayur", "pelayanan di kantor itu",
        "makanan di warung ini", "air sungai", "udara pagi", "rumah mereka",
        "pasar tradisional", "sekolah baru itu", "lalu lintas", "listrik di desa",
        "kualitas jalan", "ongkos angkutan umum", "suasana kampung",
    ],
    "adj": [
        "sangat bersih", "cukup mahal", "semakin murah", "agak kotor",
        "tidak terlalu ramai", "sangat padat", "lebih baik dari sebelumnya",
        "masih kurang memuaskan", "sangat menyenangkan", "kurang terawat",
        "sudah jauh berubah", "selalu sejuk", "sering macet", "belum stabil",
    ],
    "reason": [
        "karena hujan turun deras", "karena banyak pendatang baru",
        "sebab anggaran belum cair", "karena pasokan berkurang",
        "karena musim panen sudah tiba", "sebab jalan sedang diperbaiki",
        "karena banyak orang mudik", "karena sekolah sedang libur",
        "sebab harga pupuk naik", "karena listrik sering padam",
    ],
    "opinion": [
        "menurut saya", "kata orang", "sepertinya", "rupanya", "ternyata",
        "konon", "katanya", "sebenarnya", "jujur saja", "memang",
    ],
    "wish": [
        "semoga keadaan segera membaik", "mudah-mudahan semua berjalan lancar",
        "kami berharap ada perbaikan", "kita harus tetap bersabar",
        "semua pihak perlu bekerja sama", "warga diminta tetap tenang",
        "pemerintah sebaiknya mendengar keluhan warga",
        "kami akan terus memantau perkembangannya",
    ],
}

EN = {
    "subj": [
        "I", "we", "they", "the residents", "the local traders", "my mother",
        "my father", "our neighbours", "the farmers in the village",
        "the taxi drivers", "the teacher", "the students", "the children",
        "the city council", "the village head", "the fishermen",
        "the office workers", "the vegetable seller", "the clinic doctor",
        "the bus driver", "the shop owner", "my younger brother",
        "my older sister", "my classmates", "the museum staff",
        "the traffic police", "the midwife", "the journalists",
        "the young entrepreneurs", "the factory workers", "the committee",
    ],
    "verb_obj": [
        "bought rice at the market", "sold fresh fish", "read the morning paper",
        "watched the news on television", "repaired the broken road",
        "cleaned the drains", "planted rice in the fields",
        "cooked a vegetable soup", "took the children to school",
        "waited for the bus at the stop", "sent a parcel to the city",
        "paid the electricity bill", "filled up the car with petrol",
        "wrote a letter to the family", "looked for a new job",
        "opened a small grocery store", "attended the community meeting",
        "built a simple house", "prepared food for the guests",
        "listened to the radio", "collected plastic waste",
        "kept the neighbourhood clean", "taught english lessons",
        "treated the patients", "looked after the garden",
        "applied for a business permit", "saved money at the bank",
        "ordered a ride online", "crossed the street carefully",
        "washed the clothes", "discussed the village budget",
        "prepared the financial report", "borrowed books from the library",
        "took photographs of the view", "attended a cousin's wedding",
        "visited a friend who was sick",
    ],
    "time": [
        "every morning", "yesterday afternoon", "last week", "last night",
        "at the weekend", "next month", "since last year", "today",
        "tomorrow morning", "before dawn", "after lunch", "around sunset",
        "during the rainy season", "over the school holidays",
        "in the last few days", "after work",
    ],
    "place": [
        "in the city", "in the village", "at the traditional market",
        "near the station", "by the side of the road", "at the town hall",
        "at the district office", "at the hospital", "at the primary school",
        "at the harbour", "at the terminal", "in the main square",
        "at the coffee shop", "in the back garden", "in the new housing estate",
        "at the shopping centre",
    ],
    "adj_subj": [
        "the weather", "that road", "the price of vegetables",
        "the service at that office", "the food at this stall",
        "the river water", "the morning air", "their house",
        "the traditional market", "the new school", "the traffic",
        "the electricity supply", "the quality of the roads",
        "the cost of public transport", "the mood in the village",
    ],
    "adj": [
        "very clean", "quite expensive", "getting cheaper", "a bit dirty",
        "not too crowded", "very busy", "better than before",
        "still not satisfying", "really pleasant", "poorly maintained",
        "completely different now", "always cool", "often congested",
        "not yet stable",
    ],
    "reason": [
        "because the rain was heavy", "because many newcomers arrived",
        "since the budget has not been released", "because supplies are short",
        "because the harvest season has started",
        "since the road is being repaired", "because many people went home",
        "because the schools are on holiday",
        "since fertiliser prices went up",
        "because the power often goes out",
    ],
    "opinion": [
        "in my opinion", "people say", "apparently", "it seems", "it turns out",
        "reportedly", "to be honest", "actually", "of course", "clearly",
    ],
    "wish": [
        "hopefully things will improve soon", "we hope everything goes smoothly",
        "we are waiting for some improvement", "we just have to be patient",
        "everyone needs to work together", "residents were asked to stay calm",
        "the government should listen to people",
        "we will keep following the developments",
    ],
}

JV = {
    "subj": ["aku", "awakdewe", "wong-wong", "bapakku", "ibuku", "kancaku",
             "pak lurah", "mbakyuku", "adhiku", "bocah-bocah", "wong tani",
             "bakul sayur", "sopir angkot", "tanggaku", "simbah"],
    "verb_obj": ["tuku beras ing pasar", "adol iwak", "maca koran esuk",
                 "nonton warta ing tivi", "ndandani dalan", "resik-resik omah",
                 "nandur pari ing sawah", "masak sayur lodeh",
                 "ngeterake bocah menyang sekolah", "ngenteni bis",
                 "mbayar listrik", "ngisi bensin", "golek gawean anyar",
                 "mbukak warung cilik", "melu rapat warga", "ngombe wedang jahe",
                 "mangan sega pecel", "turu awan", "mlaku-mlaku menyang alun-alun"],
    "time": ["saben esuk", "wingi sore", "minggu wingi", "mau bengi",
             "sesuk esuk", "saiki", "mbiyen", "pas udan deres", "dina iki"],
    "tail": ["nganti kesel banget", "amarga regane larang", "ora kaya biyasane",
             "karo kanca-kanca", "supaya ora telat", "nanging durung rampung",
             "lan rasane seneng", "merga ora ana dhuwit", "sing penting slamet",
             "ora usah kuwatir"],
}

SU = {
    "subj": ["abdi", "urang", "jalmi-jalmi", "bapa abdi", "ema abdi",
             "rerencangan abdi", "pa kades", "teteh abdi", "adi abdi",
             "barudak", "patani", "tukang sayur", "supir angkot",
             "tatangga abdi", "nini"],
    "verb_obj": ["meser beas di pasar", "ngical lauk", "maca koran enjing",
                 "ningali warta dina tipi", "ngalereskeun jalan",
                 "ngabersihan bumi", "melak pare di sawah", "masak sayur asem",
                 "nganteurkeun budak ka sakola", "ngantosan beus",
                 "mayar listrik", "ngeusian bensin", "milarian padamelan anyar",
                 "muka warung alit", "ngiringan rapat warga", "nginum cai haneut",
                 "tuang sangu liwet", "kulem siang", "leumpang ka alun-alun"],
    "time": ["unggal enjing", "kamari sonten", "minggon kamari", "tadi wengi",
             "isukan enjing", "ayeuna", "kapungkur", "nalika hujan ageung",
             "dinten ieu"],
    "tail": ["dugi ka cape pisan", "margi hargana mahal", "teu sapertos biasana",
             "sareng rerencangan", "supados teu telat", "namung teu acan rengse",
             "sareng raosna bungah", "margi teu gaduh artos", "anu penting salamet",
             "teu kedah hariwang"],
}


def cap(s):
    return s[:1].upper() + s[1:]


def gen_rich(v, rng, n, joiner):
    frames = [
        lambda: f"{cap(v['subj_pick']())} {v['verb_pick']()} {v['time_pick']()}.",
        lambda: f"{cap(v['time_pick']())} {v['subj_pick']()} {v['verb_pick']()} {v['place_pick']()}.",
        lambda: f"{cap(v['opinion_pick']())}, {v['adj_subj_pick']()} {v['adj_pick']()} {v['reason_pick']()}.",
        lambda: f"{cap(v['subj_pick']())} {v['verb_pick']()} {v['place_pick']()} {v['reason_pick']()}.",
        lambda: f"{cap(v['adj_subj_pick']())} {v['place_pick']()} {v['adj_pick']()}, {v['wish_pick']()}.",
        lambda: f"{cap(v['subj_pick']())} {v['verb_pick']()} {joiner} {v['subj_pick']()} {v['verb_pick']()}.",
        lambda: f"{cap(v['opinion_pick']())} {v['subj_pick']()} {v['verb_pick']()} {v['time_pick']()}, {v['wish_pick']()}.",
    ]
    out, seen = [], set()
    while len(out) < n:
        s = rng.choice(frames)()
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def pickers(vocab, rng):
    v = {}
    for k, words in vocab.items():
        v[k + "_pick"] = (lambda w=words: rng.choice(w))
    v["verb_pick"] = v["verb_obj_pick"]
    return v


def gen_regional(vocab, rng, n):
    out, seen = [], set()
    while len(out) < n:
        s = (f"{cap(rng.choice(vocab['subj']))} {rng.choice(vocab['verb_obj'])} "
             f"{rng.choice(vocab['time'])} {rng.choice(vocab['tail'])}.")
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def main():
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "data/seeds")
    out_dir.mkdir(parents=True, exist_ok=True)
    corpora = {
        "id": gen_rich(pickers(ID, random.Random(101)), random.Random(102), 2400, "sementara"),
        "en": gen_rich(pickers(EN, random.Random(201)), random.Random(202), 2400, "while"),
        "jv": gen_regional(JV, random.Random(301), 300),
        "su": gen_regional(SU, random.Random(401), 300),
    }
    for lang, lines in corpora.items():
        (out_dir / f"{lang}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
